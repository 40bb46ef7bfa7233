// Winding numbers of the boundary unitary for the builtin scenarios.

#include "qcwb/qcwb.hpp"

#include <cstdio>

int main() {
	using namespace qcwb;
	std::printf("%-18s %8s %6s %12s %12s %10s\n", "scenario", "winding", "grid", "unitarity", "endpoint", "exact lift");
	for (const std::string& name : scenarios::names()) {
		const BRep phi = scenarios::by_name(name);
		const BoundaryResult r = boundary_map(phi);
		std::string lift = "yes";
		try {
			exact_projection_lift(phi, {r.grid, phi.fiber_dim()});
		} catch (const Error& e) {
			lift = e.kind() == ErrorKind::NoSpectralGap ? "no gap" : "failed";
		}
		std::printf("%-18s %8ld %6zu %12.2e %12.2e %10s\n", name.c_str(), r.winding, r.grid, r.unitarity_defect,
		            r.endpoint_defect, lift.c_str());
	}
	return 0;
}
