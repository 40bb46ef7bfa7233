#pragma once

#include <optional>
#include <string_view>

namespace qcwb {

// Numerical thresholds shared by all operations. The relations being
// checked are exact identities; these say how exact floating point has to be.
struct ToleranceProfile {
	double hermitian = 1e-10;          // relative, input Hermitian checks
	double eig_offdiag = 1e-14;        // Jacobi stop: off(H)_F <= eig_offdiag * |H|_F
	int eig_sweeps = 64;
	double negative_clamp = 1e-10;     // frac_power clamps eigenvalues in [-negative_clamp, 0)
	double pinv = 1e-12;               // relative singular value cutoff in pseudo_solve
	double support = 1e-10;            // spectral support threshold for positive elements
	double orthogonality = 1e-10;      // |hk| bound for orthogonal pairs
	double fnapp_hermitian = 1e-8;     // DSL function application argument check
	double factor_residual = 1e-7;     // factor_x reconstruction, relative to max(1,|x|)
	double exact_residual = 1e-10;     // "exact" representation residual bound
	double endpoint = 1e-9;            // lift endpoint match
	double unitary = 1e-8;             // boundary unitarity and endpoint defect
	double spectral_gap = 0.05;        // half-width of the hole around 1/2 for exact lifts

	static ToleranceProfile strict() {
		ToleranceProfile p;
		p.hermitian = 1e-12;
		p.fnapp_hermitian = 1e-10;
		p.factor_residual = 1e-9;
		p.endpoint = 1e-11;
		p.unitary = 1e-10;
		return p;
	}

	static ToleranceProfile loose() {
		ToleranceProfile p;
		p.hermitian = 1e-8;
		p.fnapp_hermitian = 1e-6;
		p.factor_residual = 1e-5;
		p.exact_residual = 1e-8;
		p.endpoint = 1e-7;
		p.unitary = 1e-6;
		return p;
	}

	static std::optional<ToleranceProfile> named(std::string_view name) {
		if (name == "default") return ToleranceProfile{};
		if (name == "strict") return strict();
		if (name == "loose") return loose();
		return std::nullopt;
	}
};

} // namespace qcwb
