#pragma once

#include "linalg.hpp"
#include "matrix.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace qcwb {

using Rng = std::mt19937_64;

inline Matrix random_gaussian(std::size_t n, Rng& rng) {
	std::normal_distribution<double> g(0.0, 1.0);
	Matrix m(n);
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = 0; j < n; ++j) {
			const double re = g(rng);
			const double im = g(rng);
			m(i, j) = cplx(re, im);
		}
	return m;
}

inline Matrix random_hermitian(std::size_t n, Rng& rng) { return hermitian_part(random_gaussian(n, rng)); }

/// Haar-ish unitary: Gram-Schmidt on the columns of a Gaussian matrix.
inline Matrix random_unitary(std::size_t n, Rng& rng) {
	Matrix m = random_gaussian(n, rng);
	for (std::size_t c = 0; c < n; ++c) {
		for (int pass = 0; pass < 2; ++pass)
			for (std::size_t p = 0; p < c; ++p) {
				cplx dot = 0.0;
				for (std::size_t r = 0; r < n; ++r) dot += std::conj(m(r, p)) * m(r, c);
				for (std::size_t r = 0; r < n; ++r) m(r, c) -= dot * m(r, p);
			}
		double nrm = 0.0;
		for (std::size_t r = 0; r < n; ++r) nrm += std::norm(m(r, c));
		nrm = std::sqrt(nrm);
		for (std::size_t r = 0; r < n; ++r) m(r, c) /= nrm;
	}
	return m;
}

/// U diag(values) U^* for a random unitary U.
inline Matrix random_hermitian_with_spectrum(const std::vector<double>& values, Rng& rng) {
	const Matrix u = random_unitary(values.size(), rng);
	return hermitian_part(u * Matrix::diag(values) * u.adjoint());
}

/// Scales m so that its operator norm equals `norm` (zero stays zero).
inline Matrix with_norm(const Matrix& m, double norm) {
	const double current = op_norm(m);
	if (current == 0.0) return m;
	return (norm / current) * m;
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
	return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace qcwb
