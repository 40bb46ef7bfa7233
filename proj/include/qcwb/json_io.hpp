#pragma once

// JSON reading and writing for matrices, triples, grid functions and reports.
// Readers reject ragged or non-finite data with MalformedInput.

#include "boundary.hpp"
#include "error.hpp"
#include "functions.hpp"
#include "matrix.hpp"
#include "qc_model.hpp"
#include "relations.hpp"
#include "smoothing.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace qcwb::io {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void malformed(const std::string& what) { throw Error(ErrorKind::MalformedInput, what); }

inline double finite_number(const Json& j, const std::string& where) {
	if (!j.is_number()) malformed(where + ": expected a number");
	const double v = j.get<double>();
	if (!std::isfinite(v)) malformed(where + ": non-finite value");
	return v;
}

inline const Json& field(const Json& j, const char* key, const std::string& where) {
	if (!j.is_object()) malformed(where + ": expected an object");
	auto it = j.find(key);
	if (it == j.end()) malformed(where + ": missing field '" + key + "'");
	return *it;
}

inline Json to_json(const Matrix& m) {
	Json entries = Json::array();
	for (const cplx& z : m.entries()) entries.push_back(Json::array({z.real(), z.imag()}));
	return Json{{"dim", m.dim()}, {"entries", std::move(entries)}};
}

inline Matrix matrix_from_json(const Json& j, const std::string& where = "matrix") {
	const Json& jd = field(j, "dim", where);
	if (!jd.is_number_integer() || jd.get<long long>() < 0) malformed(where + ": 'dim' must be a non-negative integer");
	const auto n = static_cast<std::size_t>(jd.get<long long>());
	const Json& je = field(j, "entries", where);
	if (!je.is_array()) malformed(where + ": 'entries' must be an array");
	if (je.size() != n * n)
		malformed(where + ": expected " + std::to_string(n * n) + " entries, found " + std::to_string(je.size()));
	Matrix m(n);
	for (std::size_t idx = 0; idx < je.size(); ++idx) {
		const Json& z = je[idx];
		const std::string at = where + ".entries[" + std::to_string(idx) + "]";
		if (!z.is_array() || z.size() != 2) malformed(at + ": expected [re, im]");
		m(idx / n, idx % n) = cplx(finite_number(z[0], at), finite_number(z[1], at));
	}
	return m;
}

inline Json to_json(const QcTriple& t) { return Json{{"h", to_json(t.h)}, {"x", to_json(t.x)}, {"k", to_json(t.k)}}; }

inline QcTriple triple_from_json(const Json& j, const std::string& where = "triple") {
	QcTriple t{matrix_from_json(field(j, "h", where), where + ".h"), matrix_from_json(field(j, "x", where), where + ".x"),
	           matrix_from_json(field(j, "k", where), where + ".k")};
	if (t.x.dim() != t.h.dim() || t.k.dim() != t.h.dim()) malformed(where + ": components differ in size");
	return t;
}

inline Json to_json(const GridFunction& f) {
	Json values = Json::array();
	for (const auto& v : f.values) values.push_back(to_json(v));
	return Json{{"grid", f.grid}, {"fiber_dim", f.fiber_dim}, {"values", std::move(values)}};
}

inline GridFunction grid_function_from_json(const Json& j, const std::string& where = "grid function") {
	const Json& jm = field(j, "grid", where);
	const Json& jn = field(j, "fiber_dim", where);
	if (!jm.is_number_integer() || !jn.is_number_integer() || jm.get<long long>() < 1 || jn.get<long long>() < 1)
		malformed(where + ": 'grid' and 'fiber_dim' must be positive integers");
	GridFunction f;
	f.grid = static_cast<std::size_t>(jm.get<long long>());
	f.fiber_dim = static_cast<std::size_t>(jn.get<long long>());
	const Json& jv = field(j, "values", where);
	if (!jv.is_array() || jv.size() != f.grid + 1) malformed(where + ": expected grid + 1 values");
	for (std::size_t i = 0; i < jv.size(); ++i) {
		f.values.push_back(matrix_from_json(jv[i], where + ".values[" + std::to_string(i) + "]"));
		if (f.values.back().dim() != f.fiber_dim) malformed(where + ": fiber size mismatch");
	}
	return f;
}

inline Json to_json(const BRep& r) { return Json{{"at0", to_json(r.at0)}, {"at1", to_json(r.at1)}}; }

inline BRep brep_from_json(const Json& j) {
	BRep r{triple_from_json(field(j, "at0", "representation"), "at0"), triple_from_json(field(j, "at1", "representation"), "at1")};
	if (r.at0.dim() != r.at1.dim()) malformed("endpoint triples differ in size");
	return r;
}

inline Json to_json(const ResidualReport& r) {
	Json out = Json::object();
	for (const auto& [label, v] : r.entries()) out[label] = v;
	return out;
}

inline Json cutoff_json(const RealFunction& f) {
	Json j{{"name", f.name}};
	j["theta"] = f.theta ? Json(*f.theta) : Json(nullptr);
	j["ramp_width"] = f.ramp_width ? Json(*f.ramp_width) : Json(nullptr);
	return j;
}

inline Json to_json(const SmoothingReport& r) {
	Json cutoffs = Json::array({cutoff_json(make_gplus(r.theta)), cutoff_json(make_gminus(r.theta)),
	                            cutoff_json(make_qplus(r.theta, r.ramp_width)),
	                            cutoff_json(make_qminus(r.theta, r.ramp_width))});
	return Json{{"success", r.success},
	            {"epsilon", r.epsilon},
	            {"theta", r.theta},
	            {"ramp_width", r.ramp_width},
	            {"delta", r.delta},
	            {"cutoffs", std::move(cutoffs)},
	            {"input_residuals", to_json(r.input_residuals)},
	            {"s_spectrum", {{"min", r.s_spectrum.min}, {"max", r.s_spectrum.max}, {"smallest_abs", r.s_spectrum.smallest_abs}}},
	            {"intermediate_defect", r.intermediate_defect},
	            {"intermediate_distance", r.intermediate_distance},
	            {"projection_displacement", r.projection_displacement},
	            {"output_residuals", to_json(r.output_residuals)},
	            {"distances", {{"h", r.dist_h}, {"k", r.dist_k}, {"x", r.dist_x}}},
	            {"corner_defect", r.corner_defect}};
}

inline Json to_json(const BoundaryResult& r) {
	return Json{{"winding", r.winding},
	            {"unitarity_defect", r.unitarity_defect},
	            {"endpoint_defect", r.endpoint_defect},
	            {"winding_real", r.winding_real},
	            {"max_phase_step", r.max_phase_step},
	            {"det_u_prime_winding", r.det_u_prime_turns},
	            {"grid", r.grid}};
}

inline Json to_json(const std::vector<rel::SweepRow>& rows) {
	Json out = Json::array();
	for (const auto& r : rows)
		out.push_back(Json{{"delta", r.delta},
		                   {"max_consequence", r.max_consequence},
		                   {"max_residual", r.max_residual},
		                   {"accepted", r.accepted},
		                   {"attempts", r.attempts}});
	return out;
}

inline rel::Env env_from_json(const Json& j) {
	if (!j.is_object()) malformed("environment: expected an object of name -> matrix");
	rel::Env env;
	for (auto it = j.begin(); it != j.end(); ++it) env[it.key()] = matrix_from_json(it.value(), it.key());
	return env;
}

inline Json to_json(const rel::Env& env) {
	Json out = Json::object();
	for (const auto& [name, m] : env) out[name] = to_json(m);
	return out;
}

inline std::string read_text(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) malformed("cannot open '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

inline Json read_json(const std::string& path) {
	try {
		return Json::parse(read_text(path));
	} catch (const nlohmann::json::parse_error& e) {
		malformed(path + ": " + e.what());
	}
}

} // namespace qcwb::io
