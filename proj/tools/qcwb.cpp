// qcwb: command-line front end for smoothing, boundary computations, the
// property suite and relation files. Reports are JSON.

#include "qcwb/qcwb.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using qcwb::ErrorKind;
using qcwb::io::Json;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_gap = 2;
constexpr int exit_residual = 3;
constexpr int exit_malformed = 64;
constexpr int exit_relation_source = 65;

struct RunConfig {
	std::string input;
	std::string output;
	std::string env;
	std::string sweep;
	std::string scenario;
	std::string profile = "default";
	std::string y_lift = "linear";
	std::size_t grid = 0;
	double epsilon = 0.1;
	std::optional<double> theta;
	std::optional<double> delta;
	std::optional<std::uint64_t> seed;
	int trials = 100;
	bool no_refine = false;
	bool exact_lift = false;
	bool write_exact = false;
};

std::uint64_t resolve_seed(const RunConfig& cfg) {
	if (cfg.seed) return *cfg.seed;
	if (const char* s = std::getenv("QCWB_SEED")) {
		try {
			return std::stoull(s);
		} catch (const std::exception&) {
			throw qcwb::Error(ErrorKind::MalformedInput, std::string("QCWB_SEED is not an integer: ") + s);
		}
	}
	return 1;
}

qcwb::ToleranceProfile resolve_profile(const RunConfig& cfg) {
	auto p = qcwb::ToleranceProfile::named(cfg.profile);
	if (!p) throw qcwb::Error(ErrorKind::MalformedInput, "unknown tolerance profile '" + cfg.profile + "'");
	return *p;
}

std::string utc_timestamp() {
	const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm tm{};
	gmtime_r(&now, &tm);
	char buf[32];
	std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buf;
}

Json envelope(const char* command) { return Json{{"command", command}, {"timestamp", utc_timestamp()}}; }

void emit(const RunConfig& cfg, const Json& j) {
	const std::string text = j.dump(2) + "\n";
	if (cfg.output.empty()) {
		std::cout << text;
		return;
	}
	std::ofstream out(cfg.output, std::ios::binary);
	if (!out) throw qcwb::Error(ErrorKind::MalformedInput, "cannot write '" + cfg.output + "'");
	out << text;
}

Json error_json(const qcwb::Error& e) { return Json{{"kind", std::string(qcwb::to_string(e.kind()))}, {"message", e.what()}}; }

int cmd_smooth(const RunConfig& cfg) {
	const auto tol = resolve_profile(cfg);
	if (cfg.input.empty()) throw qcwb::Error(ErrorKind::MalformedInput, "smooth needs --input");
	const qcwb::QcTriple t = qcwb::io::triple_from_json(qcwb::io::read_json(cfg.input));
	Json out = envelope("smooth");
	try {
		qcwb::SmoothingResult r;
		if (cfg.theta) {
			auto p = qcwb::SmoothingParams::for_theta(cfg.epsilon, *cfg.theta, cfg.delta);
			p.tol = tol;
			r = qcwb::smooth_representation(t, p);
		} else {
			r = qcwb::auto_theta(t, cfg.epsilon, cfg.delta, tol).result;
		}
		out["report"] = qcwb::io::to_json(r.report);
		if (cfg.write_exact || r.report.success) out["exact"] = qcwb::io::to_json(r.exact);
		emit(cfg, out);
		return r.report.success ? exit_ok : exit_gap;
	} catch (const qcwb::NoWorkableTheta& e) {
		out["error"] = error_json(e);
		out["error"]["last_failure"] = std::string(qcwb::to_string(e.last_failure()));
		emit(cfg, out);
		return e.last_failure() == ErrorKind::ResidualTooLarge ? exit_residual : exit_gap;
	} catch (const qcwb::Error& e) {
		if (e.kind() != ErrorKind::SpectralGapFailure && e.kind() != ErrorKind::ResidualTooLarge) throw;
		out["error"] = error_json(e);
		emit(cfg, out);
		return e.kind() == ErrorKind::ResidualTooLarge ? exit_residual : exit_gap;
	}
}

int cmd_boundary(const RunConfig& cfg) {
	const auto tol = resolve_profile(cfg);
	qcwb::BRep phi;
	std::string source;
	if (!cfg.scenario.empty()) {
		phi = qcwb::scenarios::by_name(cfg.scenario);
		source = cfg.scenario;
	} else if (!cfg.input.empty()) {
		phi = qcwb::io::brep_from_json(qcwb::io::read_json(cfg.input));
		source = cfg.input;
	} else {
		throw qcwb::Error(ErrorKind::MalformedInput, "boundary needs --scenario or --input");
	}
	qcwb::BoundaryOptions opt;
	if (cfg.grid) opt.grid = cfg.grid;
	opt.refine = !cfg.no_refine;
	if (cfg.y_lift == "linear") opt.y_lift = qcwb::linear_y;
	else if (cfg.y_lift == "cosine") opt.y_lift = qcwb::cosine_y;
	else throw qcwb::Error(ErrorKind::MalformedInput, "unknown y-lift '" + cfg.y_lift + "'");

	Json out = envelope("boundary");
	out["source"] = source;
	try {
		const qcwb::BoundaryResult r = qcwb::boundary_map(phi, opt, tol);
		out["result"] = qcwb::io::to_json(r);
		if (cfg.exact_lift) {
			try {
				const auto lift = qcwb::exact_projection_lift(phi, {r.grid, phi.fiber_dim()}, opt.y_lift, tol);
				out["exact_lift"] = Json{{"available", true}, {"min_gap", lift.min_gap}, {"max_residual", lift.max_residual},
				                         {"endpoint_defect", lift.endpoint_defect}};
			} catch (const qcwb::Error& e) {
				if (e.kind() != ErrorKind::NoSpectralGap) throw;
				out["exact_lift"] = Json{{"available", false}, {"reason", e.what()}};
			}
		}
		emit(cfg, out);
		const bool ok = r.unitarity_defect <= tol.unitary && r.endpoint_defect <= tol.unitary;
		return ok ? exit_ok : exit_failed;
	} catch (const qcwb::Error& e) {
		if (e.kind() != ErrorKind::WindingIllConditioned) throw;
		out["error"] = error_json(e);
		emit(cfg, out);
		return exit_gap;
	}
}

int cmd_check(const RunConfig& cfg) {
	qcwb::CheckConfig cc;
	cc.seed = resolve_seed(cfg);
	cc.trials = cfg.trials;
	if (cfg.grid) cc.grid = cfg.grid;
	cc.tol = resolve_profile(cfg);
	qcwb::CheckSuite suite(cc);
	suite.run();
	Json items = Json::array();
	for (const auto& c : suite.items()) {
		Json j{{"label", c.label}, {"max_residual", std::isfinite(c.value) ? Json(c.value) : Json(nullptr)},
		       {"bound", c.bound}, {"passed", c.passed}};
		if (!c.error.empty()) j["error"] = c.error;
		items.push_back(std::move(j));
	}
	Json out = envelope("check");
	out["seed"] = cc.seed;
	out["all_passed"] = suite.all_passed();
	out["items"] = std::move(items);
	emit(cfg, out);
	return suite.all_passed() ? exit_ok : exit_failed;
}

qcwb::rel::Sampler sampler_from_spec(const Json& spec, const qcwb::rel::RelationSet& rs) {
	using namespace qcwb;
	const std::string kind = spec.value("sampler", std::string("perturbation"));
	std::set<std::string> herm;
	if (spec.contains("hermitian")) {
		if (!spec["hermitian"].is_array()) io::malformed("sweep: 'hermitian' must be an array of names");
		for (const auto& v : spec["hermitian"]) herm.insert(v.get<std::string>());
	}
	if (kind == "perturbation") {
		rel::Env base;
		if (spec.contains("base")) {
			base = io::env_from_json(spec["base"]);
		} else {
			const auto m = spec.value("grid", std::size_t{4});
			base = rel::env_of(canonical_generators(m));
			if (!spec.contains("hermitian")) herm = {"h", "k"};
		}
		return rel::perturbation_sampler(rs, std::move(base), std::move(herm), spec.value("max_step", 1.0));
	}
	if (kind == "ball") {
		return rel::ball_sampler(rs.vars, spec.value("dim", std::size_t{4}), spec.value("radius", 1.0), std::move(herm));
	}
	io::malformed("sweep: unknown sampler '" + kind + "'");
}

int cmd_relations(const RunConfig& cfg) {
	using namespace qcwb;
	const auto tol = resolve_profile(cfg);
	if (cfg.input.empty()) throw Error(ErrorKind::MalformedInput, "relations needs --input (relation source)");
	const std::string source = io::read_text(cfg.input);
	rel::RelationSet rs;
	try {
		rs = rel::parse(source);
	} catch (const Error& e) {
		Json out = envelope("relations");
		out["error"] = error_json(e);
		if (const auto* se = dynamic_cast<const SyntaxError*>(&e)) {
			out["error"]["line"] = se->line();
			out["error"]["column"] = se->column();
		}
		emit(cfg, out);
		std::cerr << cfg.input << ": " << e.what() << "\n";
		return exit_relation_source;
	}
	Json out = envelope("relations");
	out["relations"] = rel::pretty(rs);
	if (!cfg.env.empty()) {
		const rel::Env env = io::env_from_json(io::read_json(cfg.env));
		out["residuals"] = io::to_json(rel::residuals(rs, env, tol));
	} else if (!cfg.sweep.empty()) {
		const Json spec = io::read_json(cfg.sweep);
		if (!spec.is_object()) io::malformed("sweep: expected an object");
		const std::string cons = io::field(spec, "consequence", "sweep").get<std::string>();
		rel::ExprPtr s;
		try {
			s = rel::parse_expr(cons, rs);
		} catch (const Error& e) {
			out["error"] = error_json(e);
			emit(cfg, out);
			std::cerr << "consequence: " << e.what() << "\n";
			return exit_relation_source;
		}
		std::vector<double> deltas;
		for (const auto& d : io::field(spec, "deltas", "sweep")) deltas.push_back(io::finite_number(d, "sweep.deltas"));
		Rng rng(resolve_seed(cfg));
		const auto rows = rel::delta_eps_sweep(rs, s, sampler_from_spec(spec, rs), deltas, spec.value("samples", 20), rng,
		                                       spec.value("budget", 0), tol);
		out["seed"] = resolve_seed(cfg);
		out["consequence"] = rel::pretty(s);
		out["sweep"] = io::to_json(rows);
	} else {
		throw Error(ErrorKind::MalformedInput, "relations needs --env or --sweep");
	}
	emit(cfg, out);
	return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"qcwb: approximate and exact representations of qC, smoothing and boundary computations"};
	app.require_subcommand(1);
	RunConfig cfg;

	auto common = [&](CLI::App* sub) {
		sub->add_option("--output", cfg.output, "Write the JSON report here instead of stdout");
		sub->add_option("--tolerance-profile", cfg.profile, "default, strict or loose");
		sub->add_option("--seed", cfg.seed, "Random seed (falls back to QCWB_SEED, then 1)");
	};

	auto* smooth = app.add_subcommand("smooth", "Smooth an approximate representation into an exact one");
	common(smooth);
	smooth->add_option("--input", cfg.input, "QcTriple JSON")->required();
	smooth->add_option("--epsilon", cfg.epsilon, "Target distance, in (0, 1/4)");
	smooth->add_option("--theta", cfg.theta, "Fixed cutoff slack; searched automatically when omitted");
	smooth->add_option("--delta", cfg.delta, "Admissible input residual (default epsilon/2)");
	smooth->add_flag("--write-exact", cfg.write_exact, "Include the output triple even when unsuccessful");

	auto* boundary = app.add_subcommand("boundary", "Compute the winding class of the boundary unitary");
	common(boundary);
	boundary->add_option("--scenario", cfg.scenario, "Builtin representation")
		->check(CLI::IsMember(qcwb::scenarios::names()));
	boundary->add_option("--input", cfg.input, "Representation JSON {\"at0\": QcTriple, \"at1\": QcTriple}");
	boundary->add_option("--grid", cfg.grid, "Grid size m (default 64)");
	boundary->add_option("--y-lift", cfg.y_lift, "linear or cosine");
	boundary->add_flag("--no-refine", cfg.no_refine, "Keep the grid fixed");
	boundary->add_flag("--exact-lift", cfg.exact_lift, "Also try the exact projection lift");

	auto* check = app.add_subcommand("check", "Run the randomized property suite");
	common(check);
	check->add_option("--trials", cfg.trials, "Random trials per property");
	check->add_option("--grid", cfg.grid, "Grid size for canonical generators");

	auto* relations = app.add_subcommand("relations", "Evaluate a relation file on an environment or run a sweep");
	common(relations);
	relations->add_option("--input", cfg.input, "Relation source")->required();
	relations->add_option("--env", cfg.env, "Environment JSON: name -> Matrix");
	relations->add_option("--sweep", cfg.sweep, "Sweep spec JSON");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		return app.exit(e) == 0 ? 0 : exit_malformed;
	}

	try {
		if (*smooth) return cmd_smooth(cfg);
		if (*boundary) return cmd_boundary(cfg);
		if (*check) return cmd_check(cfg);
		if (*relations) return cmd_relations(cfg);
	} catch (const qcwb::Error& e) {
		std::cerr << "qcwb: " << e.what() << "\n";
		if (e.kind() == ErrorKind::MalformedInput || e.kind() == ErrorKind::DimMismatch) return exit_malformed;
		return exit_failed;
	} catch (const nlohmann::json::exception& e) {
		std::cerr << "qcwb: malformed input: " << e.what() << "\n";
		return exit_malformed;
	}
	return exit_failed;
}
