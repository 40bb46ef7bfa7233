// Parses the qC relations, evaluates them on the canonical generators and
// runs a delta-epsilon sweep for x'x - (h - h^2).

#include "qcwb/qcwb.hpp"

#include <cstdio>

int main() {
	using namespace qcwb;
	const rel::RelationSet rs = rel::parse(rel::qc_relations_source);
	std::printf("%s\n", rel::pretty(rs).c_str());
	const ResidualReport report = rel::residuals(rs, rel::env_of(canonical_generators(16)));
	for (const auto& [label, value] : report.entries())
		std::printf("  %-4s %.3e\n", label.c_str(), value);

	Rng rng(1);
	const auto s = rel::parse_expr("x'*x - (h - h*h)", rs);
	const auto rows = rel::delta_eps_sweep(rs, s, rel::perturbation_sampler(rs, rel::env_of(canonical_generators(4)), {"h", "k"}),
	                                       {1e-2, 1e-3, 1e-4, 1e-5}, 10, rng);
	std::printf("\n%-10s %-14s %-14s %s\n", "delta", "max |s|", "max residual", "accepted");
	for (const auto& r : rows)
		std::printf("%-10.0e %-14.4e %-14.4e %d/%d\n", r.delta, r.max_consequence, r.max_residual, r.accepted, r.attempts);
	return 0;
}
