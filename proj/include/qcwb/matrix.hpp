#pragma once

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qcwb {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major. Every algebra element in the
/// library (generators, T-matrices, unitaries, projections) is one of these.
class Matrix {
public:
	Matrix() = default;

	explicit Matrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

	Matrix(std::size_t dim, std::vector<cplx> entries) : dim_(dim), entries_(std::move(entries)) {
		if (entries_.size() != dim_ * dim_)
			throw Error(ErrorKind::DimMismatch,
			            "expected " + std::to_string(dim_ * dim_) + " entries, got " +
			                std::to_string(entries_.size()));
	}

	static Matrix zero(std::size_t dim) { return Matrix(dim); }

	static Matrix identity(std::size_t dim) {
		Matrix m(dim);
		for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
		return m;
	}

	/// Matrix unit e_ij (0-based indices).
	static Matrix unit(std::size_t dim, std::size_t i, std::size_t j) {
		Matrix m(dim);
		m(i, j) = 1.0;
		return m;
	}

	static Matrix diag(std::span<const double> values) {
		Matrix m(values.size());
		for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
		return m;
	}

	static Matrix diag(std::initializer_list<cplx> values) {
		Matrix m(values.size());
		std::size_t i = 0;
		for (cplx v : values) {
			m(i, i) = v;
			++i;
		}
		return m;
	}

	static Matrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
		Matrix m(rows.size());
		std::size_t i = 0;
		for (const auto& row : rows) {
			if (row.size() != rows.size())
				throw Error(ErrorKind::DimMismatch, "ragged row in from_rows");
			std::size_t j = 0;
			for (cplx v : row) m(i, j++) = v;
			++i;
		}
		return m;
	}

	std::size_t dim() const noexcept { return dim_; }
	bool empty() const noexcept { return dim_ == 0; }

	cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
	const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

	std::span<const cplx> entries() const noexcept { return entries_; }

	Matrix adjoint() const {
		Matrix r(dim_);
		for (std::size_t i = 0; i < dim_; ++i)
			for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
		return r;
	}

	cplx trace() const {
		cplx t = 0.0;
		for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
		return t;
	}

	/// Square sub-block of side `size` starting at (row0, col0).
	Matrix block(std::size_t row0, std::size_t col0, std::size_t size) const {
		if (row0 + size > dim_ || col0 + size > dim_)
			throw Error(ErrorKind::DimMismatch, "block out of range");
		Matrix r(size);
		for (std::size_t i = 0; i < size; ++i)
			for (std::size_t j = 0; j < size; ++j) r(i, j) = (*this)(row0 + i, col0 + j);
		return r;
	}

	void set_block(std::size_t row0, std::size_t col0, const Matrix& b) {
		if (row0 + b.dim() > dim_ || col0 + b.dim() > dim_)
			throw Error(ErrorKind::DimMismatch, "set_block out of range");
		for (std::size_t i = 0; i < b.dim(); ++i)
			for (std::size_t j = 0; j < b.dim(); ++j) (*this)(row0 + i, col0 + j) = b(i, j);
	}

	bool is_finite() const {
		return std::all_of(entries_.begin(), entries_.end(),
		                   [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
	}

	double max_abs() const {
		double m = 0.0;
		for (cplx z : entries_) m = std::max(m, std::abs(z));
		return m;
	}

	double frobenius() const {
		double s = 0.0;
		for (cplx z : entries_) s += std::norm(z);
		return std::sqrt(s);
	}

	Matrix& operator+=(const Matrix& o) {
		check_same(o, "+");
		for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
		return *this;
	}

	Matrix& operator-=(const Matrix& o) {
		check_same(o, "-");
		for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
		return *this;
	}

	Matrix& operator*=(cplx s) {
		for (cplx& z : entries_) z *= s;
		return *this;
	}

	friend bool operator==(const Matrix&, const Matrix&) = default;

private:
	void check_same(const Matrix& o, const char* op) const {
		if (o.dim_ != dim_)
			throw Error(ErrorKind::DimMismatch, std::string("operator") + op + ": " +
			                                        std::to_string(dim_) + " vs " + std::to_string(o.dim_));
	}

	std::size_t dim_ = 0;
	std::vector<cplx> entries_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator-(Matrix a) { return a *= -1.0; }
inline Matrix operator*(cplx s, Matrix a) { return a *= s; }
inline Matrix operator*(Matrix a, cplx s) { return a *= s; }

inline Matrix operator*(const Matrix& a, const Matrix& b) {
	if (a.dim() != b.dim())
		throw Error(ErrorKind::DimMismatch,
		            "operator*: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
	const std::size_t n = a.dim();
	Matrix r(n);
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t l = 0; l < n; ++l) {
			const cplx ail = a(i, l);
			if (ail == cplx(0.0)) continue;
			for (std::size_t j = 0; j < n; ++j) r(i, j) += ail * b(l, j);
		}
	return r;
}

inline Matrix adjoint(const Matrix& m) { return m.adjoint(); }

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

/// [[a, b], [c, d]] with equal-size square blocks.
inline Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
	const std::size_t n = a.dim();
	if (b.dim() != n || c.dim() != n || d.dim() != n)
		throw Error(ErrorKind::DimMismatch, "block2x2 blocks differ in size");
	Matrix r(2 * n);
	r.set_block(0, 0, a);
	r.set_block(0, n, b);
	r.set_block(n, 0, c);
	r.set_block(n, n, d);
	return r;
}

inline Matrix direct_sum(const Matrix& a, const Matrix& b) {
	Matrix r(a.dim() + b.dim());
	r.set_block(0, 0, a);
	r.set_block(a.dim(), a.dim(), b);
	return r;
}

/// Determinant by LU with partial pivoting.
inline cplx determinant(Matrix m) {
	const std::size_t n = m.dim();
	cplx det = 1.0;
	for (std::size_t col = 0; col < n; ++col) {
		std::size_t piv = col;
		for (std::size_t r = col + 1; r < n; ++r)
			if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
		if (m(piv, col) == cplx(0.0)) return 0.0;
		if (piv != col) {
			for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
			det = -det;
		}
		det *= m(col, col);
		for (std::size_t r = col + 1; r < n; ++r) {
			const cplx f = m(r, col) / m(col, col);
			if (f == cplx(0.0)) continue;
			for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
		}
	}
	return det;
}

} // namespace qcwb
