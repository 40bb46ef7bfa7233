#include "qcwb/linalg.hpp"
#include "qcwb/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qcwb;

namespace {

// Independent oracle: largest singular value by power iteration on M^*M.
double power_iteration_norm(const Matrix& m, int iters = 5000) {
	const std::size_t n = m.dim();
	std::vector<cplx> v(n);
	for (std::size_t i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.1 * i, 0.3 - 0.05 * i);
	const Matrix g = m.adjoint() * m;
	double lambda = 0.0;
	for (int it = 0; it < iters; ++it) {
		std::vector<cplx> w(n);
		for (std::size_t i = 0; i < n; ++i)
			for (std::size_t j = 0; j < n; ++j) w[i] += g(i, j) * v[j];
		double nrm = 0.0;
		for (auto z : w) nrm += std::norm(z);
		nrm = std::sqrt(nrm);
		if (nrm == 0.0) return 0.0;
		for (auto& z : w) z /= nrm;
		lambda = nrm;
		v = w;
	}
	return std::sqrt(lambda);
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

} // namespace

TEST(Matrix, AdjointInvolution) {
	Rng rng(3);
	const Matrix m = random_gaussian(5, rng);
	EXPECT_EQ(m.adjoint().adjoint(), m);
}

TEST(Matrix, RejectsWrongEntryCount) {
	EXPECT_THROW(Matrix(2, std::vector<cplx>(3)), Error);
}

TEST(Matrix, ProductDimensionMismatch) {
	try {
		(void)(Matrix(2) * Matrix(3));
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
	}
}

TEST(Matrix, DeterminantOfTriangularAndPermutation) {
	const Matrix a = Matrix::from_rows({{2.0, 5.0, cplx(1, 1)}, {0.0, 3.0, 7.0}, {0.0, 0.0, cplx(0, 1)}});
	EXPECT_NEAR(std::abs(determinant(a) - cplx(0, 6)), 0.0, 1e-14);
	const Matrix p = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
	EXPECT_NEAR(std::abs(determinant(p) + 1.0), 0.0, 1e-15);
}

TEST(HermEig, DiagonalInput) {
	const EigenSystem es = herm_eig(Matrix::diag({3.0, 1.0}));
	ASSERT_EQ(es.eigenvalues.size(), 2u);
	EXPECT_DOUBLE_EQ(es.eigenvalues[0], 1.0);
	EXPECT_DOUBLE_EQ(es.eigenvalues[1], 3.0);
	EXPECT_NEAR(std::abs(es.basis(1, 0)), 1.0, 1e-15);
	EXPECT_NEAR(std::abs(es.basis(0, 1)), 1.0, 1e-15);
}

TEST(HermEig, PauliX) {
	const EigenSystem es = herm_eig(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
	EXPECT_NEAR(es.eigenvalues[0], -1.0, 1e-15);
	EXPECT_NEAR(es.eigenvalues[1], 1.0, 1e-15);
}

TEST(HermEig, ComplexTwoByTwoClosedForm) {
	// [[a, b], [conj b, d]] has eigenvalues (a+d)/2 -+ sqrt(((a-d)/2)^2 + |b|^2).
	const double a = 0.7, d = -1.3;
	const cplx b(0.4, -0.9);
	const EigenSystem es = herm_eig(Matrix::from_rows({{a, b}, {std::conj(b), d}}));
	const double mid = (a + d) / 2.0, rad = std::sqrt((a - d) * (a - d) / 4.0 + std::norm(b));
	EXPECT_NEAR(es.eigenvalues[0], mid - rad, 1e-14);
	EXPECT_NEAR(es.eigenvalues[1], mid + rad, 1e-14);
}

TEST(HermEig, ReconstructionAndUnitaryBasis) {
	Rng rng(11);
	for (int trial = 0; trial < 20; ++trial) {
		const Matrix h = random_hermitian(8, rng);
		const EigenSystem es = herm_eig(h);
		EXPECT_TRUE(std::is_sorted(es.eigenvalues.begin(), es.eigenvalues.end()));
		EXPECT_LE(op_norm(es.synthesize(es.eigenvalues) - h), 1e-12 * std::max(1.0, op_norm(h)));
		EXPECT_LE(op_norm(es.basis * es.basis.adjoint() - Matrix::identity(8)), 1e-12 * 8);
	}
}

TEST(HermEig, RejectsNonHermitian) {
	try {
		herm_eig(Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}}));
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
	}
}

TEST(HermEig, SweepBudgetExhaustion) {
	Rng rng(5);
	ToleranceProfile tol;
	tol.eig_sweeps = 0;
	try {
		herm_eig(random_hermitian(6, rng), tol);
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
	}
}

TEST(FuncCalc, DiagonalAndProjection) {
	const Matrix d = func_calc(Matrix::diag({0.3, -0.2}), positive_part());
	EXPECT_LE(max_abs_diff(d, Matrix::diag({0.3, 0.0})), 1e-16);
	Rng rng(2);
	const Matrix p = random_hermitian_with_spectrum({0.0, 1.0, 1.0, 0.0}, rng);
	EXPECT_LE(op_norm(func_calc(p, [](double t) { return t * t; }) - p), 1e-13);
}

TEST(FuncCalc, MultiplicativeAndSpectralMapping) {
	Rng rng(8);
	for (int trial = 0; trial < 10; ++trial) {
		const Matrix h = random_hermitian(6, rng);
		auto f = [](double t) { return 2.0 * t - t * t; };
		auto g = [](double t) { return t * t * t; };
		const Matrix fh = func_calc(h, f), gh = func_calc(h, g);
		EXPECT_LE(op_norm(func_calc(h, [&](double t) { return f(t) * g(t); }) - fh * gh), 1e-10 * std::max(1.0, op_norm(fh) * op_norm(gh)));
		EXPECT_LE(op_norm(fh * h - h * fh), 1e-11 * std::max(1.0, op_norm(h) * op_norm(fh)));
		std::vector<double> mapped;
		for (double l : herm_eig(h).eigenvalues) mapped.push_back(f(l));
		std::sort(mapped.begin(), mapped.end());
		const EigenSystem ef = herm_eig(fh);
		for (std::size_t i = 0; i < mapped.size(); ++i) EXPECT_NEAR(ef.eigenvalues[i], mapped[i], 1e-10);
	}
}

TEST(UnitaryExp, Examples) {
	EXPECT_LE(op_norm(unitary_exp(Matrix(3)) - Matrix::identity(3)), 1e-15);
	const Matrix half = unitary_exp(Matrix::diag({0.5}));
	EXPECT_NEAR(std::abs(half(0, 0) + 1.0), 0.0, 1e-15);
	Rng rng(4);
	const Matrix p = random_hermitian_with_spectrum({1.0, 0.0, 1.0}, rng);
	EXPECT_LE(op_norm(unitary_exp(p) - Matrix::identity(3)), 1e-10);
	const Matrix u = unitary_exp(random_hermitian(7, rng));
	EXPECT_LE(op_norm(u * u.adjoint() - Matrix::identity(7)), 1e-11);
}

TEST(OpNorm, Examples) {
	EXPECT_NEAR(op_norm(Matrix::from_rows({{0.0, 2.0}, {0.0, 0.0}})), 2.0, 1e-15);
	Rng rng(6);
	EXPECT_NEAR(op_norm(random_unitary(6, rng)), 1.0, 1e-10);
	EXPECT_EQ(op_norm(Matrix(4)), 0.0);
}

TEST(OpNorm, AgreesWithPowerIteration) {
	Rng rng(21);
	for (int trial = 0; trial < 10; ++trial) {
		const Matrix m = random_gaussian(6, rng);
		const double oracle = power_iteration_norm(m);
		EXPECT_NEAR(op_norm(m), oracle, 1e-8 * oracle);
	}
}

TEST(FracPower, Examples) {
	EXPECT_LE(op_norm(frac_power(Matrix::identity(3), 0.125) - Matrix::identity(3)), 1e-15);
	const Matrix d = frac_power(Matrix::diag({0.5, 0.25, 0.0}), 0.125);
	EXPECT_NEAR(d(0, 0).real(), std::pow(0.5, 0.125), 1e-15);
	EXPECT_NEAR(d(1, 1).real(), std::pow(0.25, 0.125), 1e-15);
	EXPECT_EQ(d(2, 2), cplx(0.0));
	const double t = 0.3;
	const Matrix h0 = t * Matrix::unit(2, 0, 0);
	EXPECT_LE(op_norm(frac_power(h0, 0.125) - std::pow(t, 0.125) * Matrix::unit(2, 0, 0)), 1e-15);
}

TEST(FracPower, RecombinesAndClamps) {
	Rng rng(13);
	const Matrix h = random_hermitian_with_spectrum({0.0, 0.1, 0.5, 0.9, 1.3}, rng);
	Matrix r = frac_power(h, 0.125);
	Matrix p = Matrix::identity(5);
	for (int i = 0; i < 8; ++i) p = p * r;
	EXPECT_LE(op_norm(p - h), 1e-9 * op_norm(h));
	EXPECT_NO_THROW(frac_power(Matrix::diag({-5e-11, 1.0}), 0.5));
	try {
		frac_power(Matrix::diag({-1e-3, 1.0}), 0.5);
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::NotPositive);
	}
}

TEST(NearestProjection, ExactProjectionFixed) {
	Rng rng(1);
	const Matrix p = random_hermitian_with_spectrum({1.0, 0.0, 0.0, 1.0}, rng);
	EXPECT_LE(op_norm(nearest_projection(p) - p), 1e-12);
}

TEST(NearestProjection, DiagonalExampleUsesSharpBound) {
	const Matrix p = Matrix::diag({0.1, 0.9});
	const Matrix q = nearest_projection(p);
	EXPECT_LE(max_abs_diff(q, Matrix::diag({0.0, 1.0})), 1e-15);
	const double eta = idempotency_defect(herm_eig(p));
	EXPECT_NEAR(eta, 0.09, 1e-15);
	const double dist = op_norm(q - p);
	EXPECT_NEAR(dist, 0.1, 1e-14);
	// The displacement exceeds eta; the sharp scalar bound is (1 - sqrt(1 - 4 eta))/2 <= 2 eta.
	EXPECT_GT(dist, eta);
	EXPECT_NEAR(dist, (1.0 - std::sqrt(1.0 - 4.0 * eta)) / 2.0, 1e-14);
}

TEST(NearestProjection, SpectralDisplacementOracle) {
	Rng rng(31);
	for (int trial = 0; trial < 50; ++trial) {
		std::vector<double> spec(6);
		for (auto& l : spec) l = uniform(rng) < 0.5 ? uniform(rng, 0.0, 0.2) : uniform(rng, 0.8, 1.0);
		const Matrix p = random_hermitian_with_spectrum(spec, rng);
		const Matrix q = nearest_projection(p);
		double displacement = 0.0;
		for (double l : spec) displacement = std::max(displacement, std::abs((l >= 0.5 ? 1.0 : 0.0) - l));
		EXPECT_LE((q * q - q).max_abs(), 1e-12);
		EXPECT_LE((q - q.adjoint()).max_abs(), 1e-12);
		EXPECT_LE(op_norm(q - p), displacement + 1e-10);
	}
}

TEST(NearestProjection, GapTooSmall) {
	try {
		nearest_projection(Matrix::diag({0.5, 1.0}));
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::GapTooSmall);
	}
}

TEST(PseudoSolve, Examples) {
	Rng rng(17);
	const Matrix x = random_gaussian(4, rng);
	EXPECT_LE(op_norm(pseudo_solve(Matrix::identity(4), Matrix::identity(4), x) - x), 1e-13);
	EXPECT_EQ(op_norm(pseudo_solve(Matrix(4), Matrix::identity(4), x)), 0.0);
}

TEST(PseudoSolve, ConsistencyOnRange) {
	Rng rng(19);
	for (int trial = 0; trial < 10; ++trial) {
		const Matrix a = random_hermitian_with_spectrum({0.0, 0.3, 0.7, 1.0, 0.0}, rng);
		const Matrix b = random_gaussian(5, rng) * random_hermitian_with_spectrum({0.0, 1.0, 1.0, 1.0, 1.0}, rng);
		const Matrix x = a * random_gaussian(5, rng) * b;
		EXPECT_LE(op_norm(a * pseudo_solve(a, b, x) * b - x), 1e-9 * std::max(1.0, op_norm(x)));
	}
}

TEST(RealFunctions, ZeroDisciplineFlags) {
	for (const auto& f : {positive_part(), negative_part(), sqrt0(), make_gplus(0.1), make_qplus(0.1, 0.0025)}) {
		EXPECT_TRUE(f.vanishes_at_zero()) << f.name;
		EXPECT_FALSE(f.unital_only) << f.name;
	}
	EXPECT_TRUE(clamp01().unital_only);
	EXPECT_TRUE(step_half().unital_only);
	EXPECT_EQ(step_half().smoothness, Smoothness::Step);
	EXPECT_EQ(make_gplus(0.1).smoothness, Smoothness::Smooth);
	const auto reg = FunctionRegistry::standard();
	for (const char* name : {"pos", "neg", "clamp01", "step_half", "sqrt0", "gplus", "gminus", "qplus", "qminus"})
		EXPECT_NE(reg->find(name), nullptr) << name;
}
