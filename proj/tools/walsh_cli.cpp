#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "walsh/verify.hpp"

using namespace walsh;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, VerifyFailed = 1, InputError = 2, ConvergenceError = 3, ConsistencyError = 4 };

struct Options {
  std::string intervals;
  std::string input;
  std::string output;
  std::string format = "doc";
  bool pretty = false;
  double abstol = 1e-13;
  double reltol = 1e-13;
  double quad_tol = 1e-12;
};

// thrown for malformed command-line or file input that never reaches the library
struct InputProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::pair<double, double>> parse_pair_list(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ';');) {
    if (item.find_first_not_of(" \t\n") == std::string::npos) continue;
    std::stringstream is(item);
    double lo, hi;
    char comma;
    if (!(is >> lo >> comma >> hi) || comma != ',' || !(is >> std::ws).eof())
      throw InputProblem("cannot read interval '" + item + "', expected lo,hi");
    out.push_back({lo, hi});
  }
  return out;
}

// JSON document with key "intervals", or plain text with one "lo hi" pair per line
std::vector<std::pair<double, double>> read_input_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputProblem("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<std::pair<double, double>> out;
  if (first != std::string::npos && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
      for (const auto& p : doc.at("intervals")) {
        if (!p.is_array() || p.size() != 2) throw InputProblem("each interval must be [lo, hi]");
        out.push_back({p[0].get<double>(), p[1].get<double>()});
      }
    } catch (const json::exception& ex) {
      throw InputProblem(path + ": " + ex.what());
    }
    return out;
  }
  std::stringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::stringstream ls(line);
    double lo, hi;
    if (!(ls >> lo)) continue;
    if (!(ls >> hi) || !(ls >> std::ws).eof())
      throw InputProblem(path + ":" + std::to_string(line_no) + ": expected two numbers");
    out.push_back({lo, hi});
  }
  return out;
}

IntervalUnion load_domain(const Options& o) {
  if (o.intervals.empty() == o.input.empty())
    throw InputProblem("give exactly one of --intervals or --input");
  const auto pairs = o.input.empty() ? parse_pair_list(o.intervals) : read_input_file(o.input);
  return parse_domain(std::span<const std::pair<double, double>>(pairs));
}

QuadConfig quad_config(const Options& o) {
  if (!(o.quad_tol > 0.0)) throw InputProblem("--quad-tol must be positive");
  QuadConfig q;
  q.abs_tol = q.rel_tol = o.quad_tol;
  return q;
}

IterationConfig iteration_config(const Options& o) {
  if (!(o.abstol > 0.0) || !(o.reltol > 0.0))
    throw InputProblem("--abstol and --reltol must be positive");
  IterationConfig it;
  it.abstol = o.abstol;
  it.reltol = o.reltol;
  return it;
}

cdouble parse_point(const std::string& text) {
  std::stringstream is(text);
  double re, im = 0.0;
  char comma;
  if (!(is >> re)) throw InputProblem("cannot read point '" + text + "'");
  if (is >> comma) {
    if (comma != ',' || !(is >> im)) throw InputProblem("point must be re or re,im");
  }
  if (!(is >> std::ws).eof()) throw InputProblem("trailing text in point '" + text + "'");
  return {re, im};
}

std::pair<double, double> parse_range(const std::string& text, const char* what) {
  const auto pairs = parse_pair_list(text);
  if (pairs.size() != 1 || !(pairs[0].first <= pairs[0].second))
    throw InputProblem(std::string(what) + " must be lo,hi with lo <= hi");
  return pairs[0];
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw InputProblem("cannot write " + o.output);
  out << text;
}

std::string dump(const Options& o, const json& doc) { return doc.dump(o.pretty ? 2 : -1) + "\n"; }

json complex_json(cdouble z) { return json::array({z.real(), z.imag()}); }

json params_doc(const WalshData& s) {
  const auto& g = s.green;
  const auto& L = s.L;
  json doc;
  const auto ends = g.domain.endpoints();
  doc["endpoints"] = std::vector<double>(ends.begin(), ends.end());
  json rc = g.r_coeffs;
  rc.push_back(1.0);
  doc["R_coefficients"] = rc;  // ascending powers, monic
  doc["critical_points"] = g.critical;
  doc["capacity"] = {{"value", g.cap.value},
                     {"right_formula", g.cap.right},
                     {"left_formula", g.cap.left},
                     {"discrepancy", g.cap.discrepancy}};
  doc["exponents"] = s.m.m;
  doc["alpha"] = g.alpha;
  doc["green_at_critical"] = g.green_at_critical;
  doc["centers"] = L.a;
  doc["critical_points_L"] = L.w;
  doc["boundary_abscissae"] = L.c;
  const auto outside = centers_outside_components(s);
  json flags = json::array();
  for (std::size_t j = 1; j <= L.ell(); ++j)
    flags.push_back(std::find(outside.begin(), outside.end(), j) != outside.end());
  doc["center_outside_component"] = flags;
  doc["iterations"] = {{"method", std::string(to_string(L.diagnostics.method))},
                       {"count", L.diagnostics.iterations},
                       {"step_sizes", L.diagnostics.step_sizes},
                       {"inner", L.diagnostics.inner_iterations}};
  doc["residuals"] = {{"gap_conditions", g.gap_residuals},
                      {"moment_pivot_ratio", g.pivot_ratio},
                      {"normalization_defect", s.m.defect},
                      {"center_system", L.diagnostics.residual},
                      {"invariant_violation", invariant_violation(s)}};
  return doc;
}

json map_json(const MapResult& r) {
  json j = {{"z", complex_json(r.z)},
            {"status", std::string(to_string(r.status))},
            {"residual", r.residual},
            {"iterations", r.iterations},
            {"branch", {{"kind", std::string(to_string(r.branch.kind))}, {"index", r.branch.index}}}};
  if (r.status != MapStatus::Skipped && r.status != MapStatus::Failed) j["w"] = complex_json(r.w);
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

const char* kCsvHeader = "z_re,z_im,w_re,w_im,status,residual\n";

std::string csv_row(const MapResult& r) {
  const bool has_w = r.status != MapStatus::Skipped && r.status != MapStatus::Failed;
  return num(r.z.real()) + "," + num(r.z.imag()) + "," + (has_w ? num(r.w.real()) : "nan") + "," +
         (has_w ? num(r.w.imag()) : "nan") + "," + std::string(to_string(r.status)) + "," +
         num(r.residual) + "\n";
}

void check_format(const Options& o) {
  if (o.format != "doc" && o.format != "csv") throw InputProblem("--format must be doc or csv");
}

int run_params(const Options& o) {
  check_format(o);
  const auto s = solve(load_domain(o), quad_config(o), iteration_config(o));
  if (o.format == "doc") {
    emit(o, dump(o, params_doc(s)));
    return Ok;
  }
  // flat quantity,index,value listing
  std::string out = "quantity,index,value\n";
  const auto doc = params_doc(s);
  for (const auto& [key, val] : doc.items()) {
    if (val.is_array()) {
      for (std::size_t i = 0; i < val.size(); ++i)
        if (val[i].is_number()) out += key + "," + std::to_string(i + 1) + "," + num(val[i]) + "\n";
        else if (val[i].is_boolean()) out += key + "," + std::to_string(i + 1) + "," + (val[i].get<bool>() ? "1" : "0") + "\n";
    } else if (val.is_object()) {
      for (const auto& [sub, v] : val.items())
        if (v.is_number()) out += key + "." + sub + ",," + num(v) + "\n";
    }
  }
  emit(o, out);
  return Ok;
}

int run_phi(const Options& o, const std::vector<std::string>& points) {
  check_format(o);
  if (points.empty()) throw InputProblem("give at least one --z");
  const auto s = solve(load_domain(o), quad_config(o), iteration_config(o));
  std::vector<MapResult> rs;
  for (const auto& p : points) rs.push_back(phi(parse_point(p), s));
  if (o.format == "csv") {
    std::string out = kCsvHeader;
    for (const auto& r : rs) out += csv_row(r);
    emit(o, out);
  } else {
    json doc = json::array();
    for (const auto& r : rs) doc.push_back(map_json(r));
    emit(o, dump(o, rs.size() == 1 ? doc[0] : doc));
  }
  return Ok;
}

struct GridSpec {
  std::string x_range = "-2,2";
  std::string y_range = "-2,2";
  int nx = 50;
  int ny = 50;
  unsigned threads = 0;
};

int run_grid(const Options& o, const GridSpec& gs) {
  check_format(o);
  if (gs.nx < 1 || gs.ny < 1) throw InputProblem("grid counts must be at least 1");
  const auto [x0, x1] = parse_range(gs.x_range, "--x-range");
  const auto [y0, y1] = parse_range(gs.y_range, "--y-range");
  const auto s = solve(load_domain(o), quad_config(o), iteration_config(o));
  auto coord = [](double lo, double hi, int n, int i) {
    return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  };
  std::vector<cdouble> zs;
  for (int i = 0; i < gs.ny; ++i)
    for (int k = 0; k < gs.nx; ++k) zs.push_back({coord(x0, x1, gs.nx, k), coord(y0, y1, gs.ny, i)});
  const unsigned threads = gs.threads ? gs.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto rs = phi_grid(zs, s, {}, threads);
  bool any = false;
  for (const auto& r : rs) any = any || r.status == MapStatus::Converged || r.status == MapStatus::NearBoundary;
  if (o.format == "csv") {
    std::string out = kCsvHeader;
    for (const auto& r : rs) out += csv_row(r);
    emit(o, out);
  } else {
    json rows = json::array();
    for (const auto& r : rs) rows.push_back(map_json(r));
    emit(o, dump(o, {{"nx", gs.nx}, {"ny", gs.ny}, {"rows", rows}}));
  }
  return any ? Ok : ConvergenceError;
}

int run_boundary(const Options& o, int points) {
  check_format(o);
  if (points < 3) throw InputProblem("--points must be at least 3");
  const auto s = solve(load_domain(o), quad_config(o), iteration_config(o));
  const auto comps = sample_boundary_L(s.L, static_cast<std::size_t>(points));
  bool all = true;
  if (o.format == "csv") {
    std::string out = "component,index,re,im\n";
    for (const auto& c : comps) {
      all = all && c.sampled;
      for (std::size_t i = 0; i < c.points.size(); ++i)
        out += std::to_string(c.center + 1) + "," + std::to_string(i) + "," +
               num(c.points[i].real()) + "," + num(c.points[i].imag()) + "\n";
    }
    emit(o, out);
  } else {
    json doc = json::array();
    for (const auto& c : comps) {
      all = all && c.sampled;
      json pts = json::array();
      for (auto p : c.points) pts.push_back(complex_json(p));
      json item = {{"center", c.center + 1}, {"sampled", c.sampled}, {"points", pts}};
      if (!c.sampled) item["failure"] = c.failure;
      doc.push_back(item);
    }
    emit(o, dump(o, {{"centers", s.L.a}, {"components", doc}}));
  }
  return all ? Ok : ConvergenceError;
}

int run_verify(const Options& o, const std::vector<std::string>& only, std::uint64_t seed,
               int random_sets) {
  VerifyOptions v;
  v.quad = quad_config(o);
  v.iter = iteration_config(o);
  v.seed = seed;
  v.random_sets = random_sets;
  for (const auto& item : only) {
    std::stringstream ss(item);
    for (std::string name; std::getline(ss, name, ',');) {
      bool known = false;
      for (const auto& [n, fn] : acceptance_checks()) known = known || n == name;
      if (!known) throw InputProblem("unknown check '" + name + "'");
      v.only.insert(name);
    }
  }
  const auto results = run_acceptance(v);
  int failed = 0;
  json doc = json::array();
  for (const auto& r : results) {
    std::printf("criterion %d [%s]: %s (%.2f s) %s\n", r.criterion, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    failed += r.pass ? 0 : 1;
    doc.push_back({{"criterion", r.criterion}, {"name", r.name}, {"pass", r.pass},
                   {"seconds", r.seconds}, {"detail", r.detail}});
  }
  std::printf("%d of %zu checks passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  if (!o.output.empty()) emit(o, dump(o, doc));
  return failed == 0 ? Ok : VerifyFailed;
}

int report(const std::string& code, const std::string& category, const std::string& message,
           int status) {
  std::cerr << json{{"error", {{"code", code}, {"category", category}, {"message", message}}}}.dump()
            << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Walsh lemniscatic domain and conformal map for unions of real intervals"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--intervals", o.intervals, "intervals as \"b1,b2;b3,b4;...\"");
    sub->add_option("--input", o.input, "JSON file with key \"intervals\", or text with lo hi per line");
    sub->add_option("--output", o.output, "write to this file instead of stdout");
    sub->add_option("--format", o.format, "doc (JSON) or csv")->capture_default_str();
    sub->add_flag("--pretty", o.pretty, "indent the JSON output");
    sub->add_option("--abstol", o.abstol, "absolute step tolerance of the center iteration")->capture_default_str();
    sub->add_option("--reltol", o.reltol, "relative step tolerance of the center iteration")->capture_default_str();
    sub->add_option("--quad-tol", o.quad_tol, "quadrature tolerance")->capture_default_str();
  };

  auto* params = app.add_subcommand("params", "all data of E and of the lemniscatic domain");
  common(params);

  std::vector<std::string> points;
  auto* phi_cmd = app.add_subcommand("phi", "evaluate the conformal map at points");
  common(phi_cmd);
  phi_cmd->add_option("-z,--z", points, "point re or re,im (repeatable)");

  GridSpec gs;
  auto* grid = app.add_subcommand("grid", "evaluate the map on a rectangular grid");
  common(grid);
  grid->add_option("--x-range", gs.x_range, "lo,hi")->capture_default_str();
  grid->add_option("--y-range", gs.y_range, "lo,hi")->capture_default_str();
  grid->add_option("--nx", gs.nx, "points along x")->capture_default_str();
  grid->add_option("--ny", gs.ny, "points along y")->capture_default_str();
  grid->add_option("--threads", gs.threads, "worker threads, 0 for all cores");

  int boundary_points = 256;
  auto* boundary = app.add_subcommand("boundary", "sample the boundary of the lemniscatic domain");
  common(boundary);
  boundary->add_option("--points", boundary_points, "points per component")->capture_default_str();

  std::vector<std::string> only;
  std::uint64_t seed = 410;
  int random_sets = 100;
  auto* verify = app.add_subcommand("verify", "run the regression battery");
  verify->add_option("--only", only, "comma separated check names");
  verify->add_option("--seed", seed, "seed of the random stress sets")->capture_default_str();
  verify->add_option("--random-sets", random_sets, "random sets per interval count")->capture_default_str();
  verify->add_option("--output", o.output, "also write the results as JSON");
  verify->add_flag("--pretty", o.pretty, "indent the JSON output");
  verify->add_option("--abstol", o.abstol)->capture_default_str();
  verify->add_option("--reltol", o.reltol)->capture_default_str();
  verify->add_option("--quad-tol", o.quad_tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return InputError;
  }

  try {
    if (*params) return run_params(o);
    if (*phi_cmd) return run_phi(o, points);
    if (*grid) return run_grid(o, gs);
    if (*boundary) return run_boundary(o, boundary_points);
    if (*verify) return run_verify(o, only, seed, random_sets);
  } catch (const InputProblem& e) {
    return report("InvalidInput", "input", e.what(), InputError);
  } catch (const Error& e) {
    switch (category(e.code())) {
      case ErrorCategory::Input:
        return report(std::string(name(e.code())), "input", e.what(), InputError);
      case ErrorCategory::Convergence:
        return report(std::string(name(e.code())), "convergence", e.what(), ConvergenceError);
      case ErrorCategory::Consistency:
        return report(std::string(name(e.code())), "consistency", e.what(), ConsistencyError);
    }
  }
  return Ok;
}
