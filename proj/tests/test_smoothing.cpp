#include "qcwb/check.hpp"
#include "qcwb/random.hpp"
#include "qcwb/smoothing.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qcwb;

namespace {

double triple_distance(const QcTriple& a, const QcTriple& b) {
	return std::max({op_norm(a.h - b.h), op_norm(a.x - b.x), op_norm(a.k - b.k)});
}

void expect_exact(const QcTriple& t, double bound = 1e-10) {
	EXPECT_LE(low_level_residuals(t).max(), bound);
	EXPECT_LE(op_norm(t.h * t.k), bound);
	EXPECT_LE(CheckSuite::positivity_defect(t), bound);
}

} // namespace

TEST(Cutoffs, GPlusBoundOnFineGrid) {
	for (double theta : {0.2, 0.05, 0.01, 1e-4}) {
		const RealFunction g = make_gplus(theta), gm = make_gminus(theta);
		for (int i = 0; i <= 20000; ++i) {
			const double t = i / 20000.0;
			ASSERT_LE(g(t), t) << theta << " " << t;
			ASSERT_GE(g(t), t - theta / 2.0) << theta << " " << t;
			ASSERT_EQ(g(-t), 0.0);
			ASSERT_EQ(gm(-t), g(t));
		}
	}
}

TEST(Cutoffs, QPlusBoundOnFineGrid) {
	for (double theta : {0.2, 0.05, 0.01}) {
		for (double ramp : {theta * theta / 4.0, theta * theta / 16.0}) {
			const RealFunction q = make_qplus(theta, ramp);
			for (int i = 0; i <= 20000; ++i) {
				const double t = i / 20000.0;
				const double q2 = q(t) * q(t);
				ASSERT_LE(std::sqrt(std::max(t - t * t, 0.0)) * (1.0 - q2), theta / 2.0) << theta << " " << t;
				ASSERT_GE(q(t), 0.0);
				ASSERT_LE(q(t), 1.0);
			}
			EXPECT_EQ(q(ramp), 1.0);
			EXPECT_EQ(q(0.0), 0.0);
		}
	}
}

TEST(Cutoffs, ParameterValidation) {
	EXPECT_THROW(make_qplus(0.1, 0.1 * 0.1 / 4.0 * 1.01), Error);
	EXPECT_THROW(make_gplus(0.0), Error);
	EXPECT_THROW(SmoothingParams::for_theta(0.3, 0.1).validate(), Error);
	EXPECT_THROW(SmoothingParams::for_theta(0.1, -1.0).validate(), Error);
	SmoothingParams p = SmoothingParams::for_theta(0.1, 0.05);
	p.ramp_width = 0.05;
	EXPECT_THROW(p.validate(), Error);
	EXPECT_NO_THROW(SmoothingParams::for_theta(0.1, 0.05).validate());
}

TEST(Smoothing, ZeroInputIsFixed) {
	const auto r = smooth_representation(QcTriple::zero(3), SmoothingParams::for_theta(0.1, 0.05));
	EXPECT_TRUE(r.report.success);
	EXPECT_EQ(r.report.max_distance(), 0.0);
	EXPECT_EQ(r.report.output_residuals.max(), 0.0);
}

TEST(Smoothing, ProjectionTypeRepresentationIsFixed) {
	Rng rng(31);
	const Matrix u = random_unitary(4, rng);
	const QcTriple t = conjugate(direct_sum(canonical_fiber(1.0), canonical_fiber(1.0)), u);
	const auto r = smooth_representation(t, SmoothingParams::for_theta(0.1, 0.05));
	EXPECT_TRUE(r.report.success);
	EXPECT_LE(triple_distance(r.exact, t), 1e-12);
}

TEST(Smoothing, CanonicalGeneratorsWithSpectralGapAreFixed) {
	// Spectrum of s is {+-i/4}, outside the ramps of every cutoff.
	const QcTriple t = canonical_generators(4);
	const auto r = smooth_representation(t, SmoothingParams::for_theta(0.1, 0.05));
	EXPECT_TRUE(r.report.success);
	EXPECT_LE(triple_distance(r.exact, t), 1e-12);
	EXPECT_LE(r.report.intermediate_defect, 1e-12);
}

TEST(Smoothing, CanonicalGeneratorsOnFineGrid) {
	// Grid points below theta/2 are moved, but by less than epsilon.
	const QcTriple t = canonical_generators(64);
	const auto a = auto_theta(t, 0.1);
	EXPECT_TRUE(a.result.report.success);
	EXPECT_LE(a.result.report.max_distance(), 0.1);
	expect_exact(a.result.exact);
}

TEST(Smoothing, PerturbedCanonicalSucceeds) {
	Rng rng(32);
	for (double size : {1e-2, 1e-3, 1e-4}) {
		for (int trial = 0; trial < 5; ++trial) {
			const QcTriple t = perturbed_canonical(4, size, rng);
			const auto a = auto_theta(t, 0.1);
			const SmoothingReport& rep = a.result.report;
			EXPECT_TRUE(rep.success) << size;
			EXPECT_LE(rep.max_distance(), 0.1);
			EXPECT_LE(rep.intermediate_defect, 0.05 + 1e-6);
			EXPECT_LE(rep.corner_defect, 1e-9);
			expect_exact(a.result.exact);
		}
	}
}

TEST(Smoothing, DistanceShrinksWithInputResidual) {
	Rng rng(33);
	const QcTriple base = canonical_generators(4);
	const Matrix dh = with_norm(random_hermitian(8, rng), 1.0);
	const Matrix dx = with_norm(random_gaussian(8, rng), 1.0);
	double prev = INFINITY;
	for (double size : {1e-2, 1e-3, 1e-4, 1e-5}) {
		QcTriple t = base;
		t.h += size * dh;
		t.x += size * dx;
		const auto r = smooth_representation(t, SmoothingParams::for_theta(0.1, 0.05));
		ASSERT_TRUE(r.report.success);
		EXPECT_LT(r.report.max_distance(), prev);
		EXPECT_LE(r.report.max_distance(), 10.0 * size);
		prev = r.report.max_distance();
	}
}

TEST(Smoothing, Idempotent) {
	Rng rng(34);
	const SmoothingParams p = SmoothingParams::for_theta(0.1, 0.05);
	for (int trial = 0; trial < 5; ++trial) {
		const QcTriple t = perturbed_canonical(4, 1e-4, rng);
		const QcTriple once = smooth_representation(t, p).exact;
		const QcTriple twice = smooth_representation(once, p).exact;
		EXPECT_LE(triple_distance(once, twice), 1e-9);
	}
}

TEST(Smoothing, UnitaryEquivariance) {
	Rng rng(35);
	const SmoothingParams p = SmoothingParams::for_theta(0.1, 0.025);
	const QcTriple t = perturbed_canonical(8, 1e-3, rng);
	const Matrix u = random_unitary(16, rng);
	const QcTriple a = conjugate(smooth_representation(t, p).exact, u);
	const QcTriple b = smooth_representation(conjugate(t, u), p).exact;
	EXPECT_LE(triple_distance(a, b), 1e-9);
}

TEST(Smoothing, DirectSumCompatible) {
	Rng rng(36);
	const SmoothingParams p = SmoothingParams::for_theta(0.1, 0.05);
	const QcTriple t1 = perturbed_canonical(2, 1e-3, rng);
	const QcTriple t2 = perturbed_canonical(3, 1e-3, rng);
	const QcTriple whole = smooth_representation(direct_sum(t1, t2), p).exact;
	const QcTriple parts = direct_sum(smooth_representation(t1, p).exact, smooth_representation(t2, p).exact);
	EXPECT_LE(triple_distance(whole, parts), 1e-9);
}

TEST(Smoothing, ReportSpectrumMatchesEigensolver) {
	Rng rng(37);
	const QcTriple t = perturbed_canonical(3, 1e-3, rng);
	const auto r = smooth_representation(t, SmoothingParams::for_theta(0.1, 0.05));
	const EigenSystem es = herm_eig(hermitian_part(t.h - t.k));
	EXPECT_NEAR(r.report.s_spectrum.min, es.min(), 1e-12);
	EXPECT_NEAR(r.report.s_spectrum.max, es.max(), 1e-12);
	EXPECT_EQ(r.report.input_residuals.max(), low_level_residuals(t).max());
}

TEST(Smoothing, ResidualTooLarge) {
	Rng rng(38);
	QcTriple t = random_contraction_triple(3, rng);
	t.h = Matrix::identity(3) * 0.5;
	try {
		smooth_representation(t, SmoothingParams::for_theta(0.1, 0.05));
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::ResidualTooLarge);
	}
	QcTriple big = QcTriple::zero(2);
	big.h = Matrix::identity(2) * 3.0;
	EXPECT_THROW(smooth_representation(big, SmoothingParams::for_theta(0.1, 0.05, 100.0)), Error);
	try {
		auto_theta(t, 0.1);
		FAIL();
	} catch (const NoWorkableTheta& e) {
		EXPECT_EQ(e.last_failure(), ErrorKind::ResidualTooLarge);
	}
}

TEST(Smoothing, NoWorkableThetaForAdversarialInput) {
	// h = 1/2 with a widened admissibility bound: T2 = diag(1/2, 0) for every
	// theta, so |T2^2 - T2| = 1/4.
	QcTriple t = QcTriple::zero(1);
	t.h(0, 0) = 0.5;
	try {
		auto_theta(t, 0.1, 0.3);
		FAIL();
	} catch (const NoWorkableTheta& e) {
		EXPECT_EQ(e.kind(), ErrorKind::NoWorkableTheta);
		EXPECT_EQ(e.last_failure(), ErrorKind::SpectralGapFailure);
	}
}

TEST(Smoothing, DimMismatch) {
	QcTriple t{Matrix(2), Matrix(3), Matrix(2)};
	try {
		smooth_representation(t, SmoothingParams::for_theta(0.1, 0.05));
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
	}
}
