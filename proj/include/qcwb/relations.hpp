#pragma once

// Relation language: *-polynomials in noncommuting variables, composed with
// registered scalar functions applied to self-adjoint subexpressions.
//
//   vars h x k;
//   herm h k;        # optional: variables assumed self-adjoint
//   rel r1: h'*h + x'*x - h = 0;
//   rel r2: clamp01(sym(h - k)) = 0;
//
// `'` is the postfix adjoint, `(re,im)` a complex scalar, `sym(e)` stands for
// (e + e')/2. `#` starts a comment.

#include "error.hpp"
#include "functions.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "qc_model.hpp"
#include "random.hpp"
#include "tolerance.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcwb::rel {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class Op { Var, Adjoint, Sum, Diff, Prod, Scale, FnApp, Const };

/// Immutable AST node. `Const` only exists transiently while parsing; a
/// validated expression never contains one.
struct Expr {
	Op op;
	std::string name; // Var: variable, FnApp: function
	cplx scalar{};    // Scale, Const
	ExprPtr lhs;      // unary operand or left operand
	ExprPtr rhs;

	static ExprPtr var(std::string n) { return std::make_shared<Expr>(Expr{Op::Var, std::move(n), {}, nullptr, nullptr}); }
	static ExprPtr adjoint(ExprPtr e) { return std::make_shared<Expr>(Expr{Op::Adjoint, {}, {}, std::move(e), nullptr}); }
	static ExprPtr sum(ExprPtr a, ExprPtr b) { return std::make_shared<Expr>(Expr{Op::Sum, {}, {}, std::move(a), std::move(b)}); }
	static ExprPtr diff(ExprPtr a, ExprPtr b) { return std::make_shared<Expr>(Expr{Op::Diff, {}, {}, std::move(a), std::move(b)}); }
	static ExprPtr prod(ExprPtr a, ExprPtr b) { return std::make_shared<Expr>(Expr{Op::Prod, {}, {}, std::move(a), std::move(b)}); }
	static ExprPtr scale(cplx c, ExprPtr e) { return std::make_shared<Expr>(Expr{Op::Scale, {}, c, std::move(e), nullptr}); }
	static ExprPtr fn(std::string f, ExprPtr e) { return std::make_shared<Expr>(Expr{Op::FnApp, std::move(f), {}, std::move(e), nullptr}); }
	static ExprPtr constant(cplx c) { return std::make_shared<Expr>(Expr{Op::Const, {}, c, nullptr, nullptr}); }
};

inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
	if (!a || !b) return a == b;
	if (a->op != b->op || a->name != b->name || a->scalar != b->scalar) return false;
	return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
}

inline std::set<std::string> variables_of(const ExprPtr& e) {
	std::set<std::string> out;
	std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& n) {
		if (!n) return;
		if (n->op == Op::Var) out.insert(n->name);
		walk(n->lhs);
		walk(n->rhs);
	};
	walk(e);
	return out;
}

// ---------------------------------------------------------------------------
// Pretty printing. Fully parenthesized so that parse(pretty(e)) == e.

inline std::string format_number(double v) {
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

inline std::string pretty(const ExprPtr& e) {
	switch (e->op) {
	case Op::Var: return e->name;
	case Op::Const: return "(" + format_number(e->scalar.real()) + "," + format_number(e->scalar.imag()) + ")";
	case Op::Adjoint:
		if (e->lhs->op == Op::Var || e->lhs->op == Op::FnApp) return pretty(e->lhs) + "'";
		return "(" + pretty(e->lhs) + ")'";
	case Op::Sum: return "(" + pretty(e->lhs) + " + " + pretty(e->rhs) + ")";
	case Op::Diff: return "(" + pretty(e->lhs) + " - " + pretty(e->rhs) + ")";
	case Op::Prod: return "(" + pretty(e->lhs) + " * " + pretty(e->rhs) + ")";
	case Op::Scale:
		return "((" + format_number(e->scalar.real()) + "," + format_number(e->scalar.imag()) + ") * " +
		       pretty(e->lhs) + ")";
	case Op::FnApp: return e->name + "(" + pretty(e->lhs) + ")";
	}
	return {};
}

// ---------------------------------------------------------------------------
// Formal self-adjointness by expansion into noncommutative polynomials.
// Letters are variables, adjointed variables, or function atoms f{arg}.

namespace detail {

using Word = std::vector<std::string>;
using Poly = std::map<Word, cplx>;

// Letters ending in '~' are self-adjoint variables; '{' marks a function atom.
inline std::string toggle(const std::string& letter) {
	if (letter.find('{') != std::string::npos || letter.back() == '~') return letter;
	if (!letter.empty() && letter.back() == '\'') return letter.substr(0, letter.size() - 1);
	return letter + "'";
}

inline Poly adjoint_poly(const Poly& p) {
	Poly out;
	for (const auto& [w, c] : p) {
		Word r(w.rbegin(), w.rend());
		for (auto& l : r) l = toggle(l);
		out[r] += std::conj(c);
	}
	return out;
}

inline Poly expand(const ExprPtr& e, const std::set<std::string>& herm) {
	Poly out;
	switch (e->op) {
	case Op::Var: out[{herm.count(e->name) ? e->name + "~" : e->name}] = 1.0; break;
	case Op::Const: out[{}] = e->scalar; break;
	case Op::FnApp: out[{e->name + "{" + pretty(e->lhs) + "}"}] = 1.0; break;
	case Op::Adjoint: out = adjoint_poly(expand(e->lhs, herm)); break;
	case Op::Scale:
		out = expand(e->lhs, herm);
		for (auto& [w, c] : out) c *= e->scalar;
		break;
	case Op::Sum:
	case Op::Diff: {
		out = expand(e->lhs, herm);
		const double sign = e->op == Op::Sum ? 1.0 : -1.0;
		for (const auto& [w, c] : expand(e->rhs, herm)) out[w] += sign * c;
		break;
	}
	case Op::Prod: {
		const Poly a = expand(e->lhs, herm);
		const Poly b = expand(e->rhs, herm);
		for (const auto& [wa, ca] : a)
			for (const auto& [wb, cb] : b) {
				Word w = wa;
				w.insert(w.end(), wb.begin(), wb.end());
				out[w] += ca * cb;
			}
		break;
	}
	}
	return out;
}

inline bool poly_equal(const Poly& a, const Poly& b) {
	double scale = 0.0;
	for (const auto& [w, c] : a) scale = std::max(scale, std::abs(c));
	for (const auto& [w, c] : b) scale = std::max(scale, std::abs(c));
	const double tol = 1e-12 * std::max(1.0, scale);
	Poly d = a;
	for (const auto& [w, c] : b) d[w] -= c;
	for (const auto& [w, c] : d)
		if (std::abs(c) > tol) return false;
	return true;
}

} // namespace detail

/// True when e equals its own adjoint as a noncommutative polynomial in the
/// variables, their adjoints and the (self-adjoint) function atoms. Names in
/// `herm` are taken to be self-adjoint.
inline bool formally_self_adjoint(const ExprPtr& e, const std::set<std::string>& herm = {}) {
	const auto p = detail::expand(e, herm);
	return detail::poly_equal(p, detail::adjoint_poly(p));
}

// ---------------------------------------------------------------------------
// Relation sets.

struct Relation {
	std::string label;
	ExprPtr expr;
};

struct RelationSet {
	std::vector<std::string> vars;
	std::set<std::string> hermitian;
	std::vector<Relation> relations;
	std::shared_ptr<const FunctionRegistry> registry;

	const Relation* find(const std::string& label) const {
		for (const auto& r : relations)
			if (r.label == label) return &r;
		return nullptr;
	}
};

inline std::string pretty(const RelationSet& rs) {
	std::string out = "vars";
	for (const auto& v : rs.vars) out += " " + v;
	out += ";\n";
	if (!rs.hermitian.empty()) {
		out += "herm";
		for (const auto& v : rs.hermitian) out += " " + v;
		out += ";\n";
	}
	for (const auto& r : rs.relations) out += "rel " + r.label + ": " + pretty(r.expr) + " = 0;\n";
	return out;
}

namespace detail {

enum class Tok { Ident, Number, LParen, RParen, Comma, Plus, Minus, Star, Quote, Colon, Semicolon, Equals, End };

struct Token {
	Tok kind;
	std::string text;
	double number = 0.0;
	int line = 1;
	int column = 1;
};

inline std::vector<Token> lex(std::string_view src) {
	std::vector<Token> out;
	int line = 1, col = 1;
	std::size_t i = 0;
	auto advance = [&](std::size_t n) {
		for (std::size_t k = 0; k < n; ++k) {
			if (src[i] == '\n') ++line, col = 1;
			else ++col;
			++i;
		}
	};
	while (i < src.size()) {
		const char c = src[i];
		if (c == '#') {
			while (i < src.size() && src[i] != '\n') advance(1);
			continue;
		}
		if (std::isspace(static_cast<unsigned char>(c))) {
			advance(1);
			continue;
		}
		Token t{Tok::End, {}, 0.0, line, col};
		if (c >= 'a' && c <= 'z') {
			std::size_t j = i;
			while (j < src.size() && ((src[j] >= 'a' && src[j] <= 'z') || std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
			t.kind = Tok::Ident;
			t.text = std::string(src.substr(i, j - i));
			out.push_back(t);
			advance(j - i);
			continue;
		}
		if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
			std::size_t j = i;
			while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
			if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
				std::size_t k = j + 1;
				if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
				if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
					j = k;
					while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
				}
			}
			t.kind = Tok::Number;
			t.text = std::string(src.substr(i, j - i));
			const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
			if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
				throw SyntaxError("malformed number '" + t.text + "'", line, col);
			out.push_back(t);
			advance(j - i);
			continue;
		}
		switch (c) {
		case '(': t.kind = Tok::LParen; break;
		case ')': t.kind = Tok::RParen; break;
		case ',': t.kind = Tok::Comma; break;
		case '+': t.kind = Tok::Plus; break;
		case '-': t.kind = Tok::Minus; break;
		case '*': t.kind = Tok::Star; break;
		case '\'': t.kind = Tok::Quote; break;
		case ':': t.kind = Tok::Colon; break;
		case ';': t.kind = Tok::Semicolon; break;
		case '=': t.kind = Tok::Equals; break;
		default: throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
		}
		t.text = std::string(1, c);
		out.push_back(t);
		advance(1);
	}
	out.push_back(Token{Tok::End, "end of input", 0.0, line, col});
	return out;
}

class Parser {
public:
	explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

	const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

	Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

	Token expect(Tok kind, const char* what) {
		if (peek().kind != kind) fail(std::string("expected ") + what + ", found '" + peek().text + "'");
		return take();
	}

	[[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().line, peek().column); }

	bool at_end() const { return peek().kind == Tok::End; }

	// expr := term (('+' | '-') term)*
	ExprPtr expr() {
		ExprPtr e = term();
		while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
			const bool plus = take().kind == Tok::Plus;
			ExprPtr r = term();
			e = plus ? Expr::sum(e, r) : Expr::diff(e, r);
		}
		return e;
	}

	// term := unary ('*' unary)*
	ExprPtr term() {
		ExprPtr e = unary();
		while (peek().kind == Tok::Star) {
			take();
			e = Expr::prod(e, unary());
		}
		return e;
	}

	// unary := '-' unary | postfix
	ExprPtr unary() {
		if (peek().kind == Tok::Minus) {
			take();
			return Expr::scale(-1.0, unary());
		}
		return postfix();
	}

	// postfix := primary "'"*
	ExprPtr postfix() {
		ExprPtr e = primary();
		while (peek().kind == Tok::Quote) {
			take();
			e = Expr::adjoint(e);
		}
		return e;
	}

	ExprPtr primary() {
		const Token& t = peek();
		if (t.kind == Tok::Number) {
			take();
			return Expr::constant(t.number);
		}
		if (t.kind == Tok::Ident) {
			Token id = take();
			if (peek().kind == Tok::LParen) {
				take();
				ExprPtr arg = expr();
				expect(Tok::RParen, "')'");
				if (id.text == "sym") return Expr::scale(0.5, Expr::sum(arg, Expr::adjoint(arg)));
				return Expr::fn(id.text, arg);
			}
			return Expr::var(id.text);
		}
		if (t.kind == Tok::LParen) {
			if (auto c = complex_literal()) return Expr::constant(*c);
			take();
			ExprPtr e = expr();
			expect(Tok::RParen, "')'");
			return e;
		}
		fail("expected an expression, found '" + t.text + "'");
	}

private:
	// '(' [sign] number ',' [sign] number ')'
	std::optional<cplx> complex_literal() {
		std::size_t k = 1;
		double sign_re = 1.0;
		if (peek(k).kind == Tok::Minus || peek(k).kind == Tok::Plus) sign_re = peek(k++).kind == Tok::Minus ? -1.0 : 1.0;
		if (peek(k).kind != Tok::Number || peek(k + 1).kind != Tok::Comma) return std::nullopt;
		const double re = sign_re * peek(k).number;
		take();
		for (std::size_t s = 1; s < k + 2; ++s) take();
		double sign_im = 1.0;
		if (peek().kind == Tok::Minus || peek().kind == Tok::Plus) sign_im = take().kind == Tok::Minus ? -1.0 : 1.0;
		const double im = sign_im * expect(Tok::Number, "imaginary part").number;
		expect(Tok::RParen, "')' closing complex scalar");
		return cplx(re, im);
	}

	std::vector<Token> toks_;
	std::size_t pos_ = 0;
};

/// Folds scalar factors into Scale nodes. Constants that survive are
/// constant terms.
inline ExprPtr fold(const ExprPtr& e) {
	switch (e->op) {
	case Op::Var:
	case Op::Const: return e;
	case Op::Adjoint: {
		ExprPtr a = fold(e->lhs);
		if (a->op == Op::Const) return Expr::constant(std::conj(a->scalar));
		return Expr::adjoint(a);
	}
	case Op::Sum:
	case Op::Diff: {
		ExprPtr a = fold(e->lhs), b = fold(e->rhs);
		if (a->op == Op::Const && b->op == Op::Const)
			return Expr::constant(e->op == Op::Sum ? a->scalar + b->scalar : a->scalar - b->scalar);
		return e->op == Op::Sum ? Expr::sum(a, b) : Expr::diff(a, b);
	}
	case Op::Prod: {
		ExprPtr a = fold(e->lhs), b = fold(e->rhs);
		if (a->op == Op::Const && b->op == Op::Const) return Expr::constant(a->scalar * b->scalar);
		if (a->op == Op::Const) return Expr::scale(a->scalar, b);
		if (b->op == Op::Const) return Expr::scale(b->scalar, a);
		return Expr::prod(a, b);
	}
	case Op::Scale: {
		ExprPtr a = fold(e->lhs);
		if (a->op == Op::Const) return Expr::constant(e->scalar * a->scalar);
		return Expr::scale(e->scalar, a);
	}
	case Op::FnApp: return Expr::fn(e->name, fold(e->lhs));
	}
	return e;
}

inline void validate(const ExprPtr& e, const std::set<std::string>& declared, const std::set<std::string>& herm,
                     const FunctionRegistry& reg, const std::string& where) {
	switch (e->op) {
	case Op::Const:
		throw Error(ErrorKind::ValidationError, where + ": constant term " + pretty(e) + " (relations must vanish at 0)");
	case Op::Var:
		if (!declared.count(e->name)) throw Error(ErrorKind::ValidationError, where + ": undeclared variable '" + e->name + "'");
		return;
	case Op::FnApp: {
		const RealFunction* f = reg.find(e->name);
		if (!f) throw Error(ErrorKind::ValidationError, where + ": unregistered function '" + e->name + "'");
		if (!f->vanishes_at_zero()) throw Error(ErrorKind::ValidationError, where + ": function '" + e->name + "' does not vanish at 0");
		validate(e->lhs, declared, herm, reg, where);
		if (!formally_self_adjoint(e->lhs, herm))
			throw Error(ErrorKind::ValidationError,
			            where + ": argument of '" + e->name + "' is not self-adjoint; wrap it in sym(...)");
		return;
	}
	default:
		if (e->lhs) validate(e->lhs, declared, herm, reg, where);
		if (e->rhs) validate(e->rhs, declared, herm, reg, where);
	}
}

} // namespace detail

/// Parses a relation file. Throws SyntaxError (with location) or ValidationError.
inline RelationSet parse(std::string_view text, std::shared_ptr<const FunctionRegistry> registry = FunctionRegistry::standard()) {
	detail::Parser p(detail::lex(text));
	RelationSet rs;
	rs.registry = std::move(registry);
	std::set<std::string> declared;
	std::set<std::string> labels;
	std::vector<std::pair<Relation, detail::Token>> pending;
	while (!p.at_end()) {
		const detail::Token kw = p.expect(detail::Tok::Ident, "'vars', 'herm' or 'rel'");
		if (kw.text == "vars") {
			if (p.peek().kind != detail::Tok::Ident) p.fail("expected a variable name");
			while (p.peek().kind == detail::Tok::Ident) {
				const auto v = p.take();
				if (!declared.insert(v.text).second) throw SyntaxError("variable '" + v.text + "' declared twice", v.line, v.column);
				rs.vars.push_back(v.text);
			}
			p.expect(detail::Tok::Semicolon, "';'");
		} else if (kw.text == "herm") {
			if (p.peek().kind != detail::Tok::Ident) p.fail("expected a variable name");
			while (p.peek().kind == detail::Tok::Ident) {
				const auto v = p.take();
				if (!declared.count(v.text)) throw SyntaxError("'" + v.text + "' must be declared with vars first", v.line, v.column);
				rs.hermitian.insert(v.text);
			}
			p.expect(detail::Tok::Semicolon, "';'");
		} else if (kw.text == "rel") {
			const auto label = p.expect(detail::Tok::Ident, "relation label");
			if (!labels.insert(label.text).second) throw SyntaxError("duplicate relation label '" + label.text + "'", label.line, label.column);
			p.expect(detail::Tok::Colon, "':'");
			ExprPtr e = p.expr();
			p.expect(detail::Tok::Equals, "'='");
			const auto zero = p.expect(detail::Tok::Number, "'0'");
			if (zero.number != 0.0) throw SyntaxError("right-hand side must be 0", zero.line, zero.column);
			p.expect(detail::Tok::Semicolon, "';'");
			pending.push_back({Relation{label.text, detail::fold(e)}, label});
		} else {
			throw SyntaxError("expected 'vars', 'herm' or 'rel', found '" + kw.text + "'", kw.line, kw.column);
		}
	}
	for (auto& [r, tok] : pending) {
		detail::validate(r.expr, declared, rs.hermitian, *rs.registry,
		                 "relation '" + r.label + "' (line " + std::to_string(tok.line) + ")");
		rs.relations.push_back(std::move(r));
	}
	return rs;
}

/// Parses a single expression over the variables of `rs`.
inline ExprPtr parse_expr(std::string_view text, const RelationSet& rs) {
	detail::Parser p(detail::lex(text));
	ExprPtr e = detail::fold(p.expr());
	if (!p.at_end()) p.fail("trailing input");
	detail::validate(e, std::set<std::string>(rs.vars.begin(), rs.vars.end()), rs.hermitian, *rs.registry, "expression");
	return e;
}

/// The low-level qC relations in the relation language.
inline constexpr std::string_view qc_relations_source = R"(# qC: generators h, x, k
vars h x k;
rel r1: h'*h + x'*x - h = 0;
rel r2: k'*k + x*x' - k = 0;
rel r3: k*x - x*h = 0;
rel r4: h*k = 0;
)";

// ---------------------------------------------------------------------------
// Evaluation.

using Env = std::map<std::string, Matrix>;

inline Matrix eval(const ExprPtr& e, const Env& env, const FunctionRegistry& reg, const ToleranceProfile& tol = {}) {
	switch (e->op) {
	case Op::Var: {
		auto it = env.find(e->name);
		if (it == env.end()) throw Error(ErrorKind::UnboundVariable, "variable '" + e->name + "' is not bound");
		return it->second;
	}
	case Op::Adjoint: return eval(e->lhs, env, reg, tol).adjoint();
	case Op::Sum: return eval(e->lhs, env, reg, tol) + eval(e->rhs, env, reg, tol);
	case Op::Diff: return eval(e->lhs, env, reg, tol) - eval(e->rhs, env, reg, tol);
	case Op::Prod: return eval(e->lhs, env, reg, tol) * eval(e->rhs, env, reg, tol);
	case Op::Scale: return e->scalar * eval(e->lhs, env, reg, tol);
	case Op::FnApp: {
		const RealFunction* f = reg.find(e->name);
		if (!f) throw Error(ErrorKind::ValidationError, "unregistered function '" + e->name + "'");
		const Matrix arg = eval(e->lhs, env, reg, tol);
		const double defect = op_norm(arg - arg.adjoint(), tol);
		if (defect > tol.fnapp_hermitian * std::max(1.0, op_norm(arg, tol)))
			throw Error(ErrorKind::NotHermitianAtFnApp,
			            "argument of '" + e->name + "' has Hermitian defect " + std::to_string(defect));
		return func_calc(hermitian_part(arg), *f, tol);
	}
	case Op::Const: throw Error(ErrorKind::ValidationError, "constant term in evaluated expression");
	}
	return {};
}

inline ResidualReport residuals(const RelationSet& rs, const Env& env, const ToleranceProfile& tol = {}) {
	ResidualReport r;
	for (const auto& rel : rs.relations) r.add(rel.label, op_norm(eval(rel.expr, env, *rs.registry, tol), tol));
	return r;
}

inline Env env_of(const QcTriple& t) { return {{"h", t.h}, {"x", t.x}, {"k", t.k}}; }

// ---------------------------------------------------------------------------
// Empirical delta-epsilon sweep.

/// Draws an environment targeted at residual level delta; nullopt = rejected draw.
using Sampler = std::function<std::optional<Env>(Rng&, double delta)>;

struct SweepRow {
	double delta = 0.0;
	double max_consequence = 0.0; // max |s| over accepted samples
	double max_residual = 0.0;    // max relation residual over accepted samples
	int accepted = 0;
	int attempts = 0;
};

/// For each delta (descending) draws `samples` environments with all
/// relation residuals <= delta and records the largest |s| seen.
inline std::vector<SweepRow> delta_eps_sweep(const RelationSet& rs, const ExprPtr& s, const Sampler& sampler,
                                             const std::vector<double>& deltas, int samples, Rng& rng,
                                             int attempt_budget = 0, const ToleranceProfile& tol = {}) {
	for (std::size_t i = 1; i < deltas.size(); ++i)
		if (!(deltas[i] < deltas[i - 1])) throw Error(ErrorKind::ValidationError, "deltas must be strictly descending");
	if (attempt_budget <= 0) attempt_budget = 20 * std::max(samples, 1);
	std::vector<SweepRow> rows;
	for (double delta : deltas) {
		SweepRow row;
		row.delta = delta;
		while (row.accepted < samples && row.attempts < attempt_budget) {
			++row.attempts;
			auto env = sampler(rng, delta);
			if (!env) continue;
			const double res = rs.relations.empty() ? 0.0 : residuals(rs, *env, tol).max();
			if (res > delta) continue;
			++row.accepted;
			row.max_residual = std::max(row.max_residual, res);
			row.max_consequence = std::max(row.max_consequence, op_norm(eval(s, *env, *rs.registry, tol), tol));
		}
		if (row.accepted == 0)
			throw Error(ErrorKind::SamplerExhausted, "no environment with residual <= " + format_number(delta) + " after " +
			                                             std::to_string(row.attempts) + " attempts");
		rows.push_back(row);
	}
	return rows;
}

/// Starts at `base`, draws a random direction (Hermitian for the names in
/// `hermitian`, general otherwise, each of unit norm) and bisects the step
/// length so that the largest relation residual lands just below delta.
inline Sampler perturbation_sampler(RelationSet rs, Env base, std::set<std::string> hermitian, double max_step = 1.0,
                                    ToleranceProfile tol = {}) {
	return [rs = std::move(rs), base = std::move(base), hermitian = std::move(hermitian), max_step,
	        tol](Rng& rng, double delta) -> std::optional<Env> {
		auto residual_at = [&](const Env& dir, double step) {
			Env env = base;
			for (auto& [name, m] : env) m += step * dir.at(name);
			return std::make_pair(rs.relations.empty() ? 0.0 : residuals(rs, env, tol).max(), env);
		};
		Env dir;
		for (const auto& [name, m] : base) {
			Matrix d = hermitian.count(name) ? random_hermitian(m.dim(), rng) : random_gaussian(m.dim(), rng);
			dir[name] = with_norm(d, 1.0);
		}
		auto [r0, e0] = residual_at(dir, 0.0);
		if (r0 > delta) return std::nullopt;
		double lo = 0.0;
		double hi = delta;
		Env best = e0;
		while (true) {
			auto [r, e] = residual_at(dir, hi);
			if (r > delta) break;
			lo = hi;
			best = std::move(e);
			if (hi >= max_step) return best;
			hi = std::min(2.0 * hi, max_step);
		}
		for (int it = 0; it < 60; ++it) {
			const double mid = 0.5 * (lo + hi);
			auto [r, e] = residual_at(dir, mid);
			if (r <= delta) lo = mid, best = std::move(e);
			else hi = mid;
		}
		return best;
	};
}

/// Independent random matrices of operator norm `radius` for every variable.
inline Sampler ball_sampler(std::vector<std::string> vars, std::size_t dim, double radius,
                            std::set<std::string> hermitian = {}) {
	return [vars = std::move(vars), dim, radius, hermitian = std::move(hermitian)](Rng& rng, double) -> std::optional<Env> {
		Env env;
		for (const auto& v : vars) {
			Matrix m = hermitian.count(v) ? random_hermitian(dim, rng) : random_gaussian(dim, rng);
			env[v] = with_norm(m, radius);
		}
		return env;
	};
}

/// Exact representations: random unitary conjugates of `base`.
inline Sampler conjugation_sampler(Env base) {
	return [base = std::move(base)](Rng& rng, double) -> std::optional<Env> {
		const std::size_t n = base.begin()->second.dim();
		const Matrix u = random_unitary(n, rng);
		const Matrix ua = u.adjoint();
		Env env;
		for (const auto& [name, m] : base) env[name] = u * m * ua;
		return env;
	};
}

} // namespace qcwb::rel
