// cm: batch front end for the metric referential library. Reads JSON inputs,
// writes one deterministic JSON report per invocation to stdout.
//
// Exit codes: 0 success, 2 parse error, 3 invariant violation, 4 name or
// dimension error, 5 singular metric.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cm/cm.hpp"

using json = nlohmann::ordered_json;
using Mat = cm::Mat<double>;
using Vec = cm::Vec<double>;

namespace {

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NameLookupFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseFailure("cannot open input '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseFailure(what + " is not valid JSON");
  return j;
}

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseFailure(path + " must be a number");
  return j.get<double>();
}

Mat require_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ParseFailure(path + " must be a nonempty array of rows");
  const auto rows = static_cast<cm::Index>(j.size());
  cm::Index cols = -1;
  Mat m;
  for (cm::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    if (!row.is_array())
      throw ParseFailure(path + "[" + std::to_string(i) + "] must be an array");
    if (cols < 0) {
      cols = static_cast<cm::Index>(row.size());
      if (cols == 0) throw ParseFailure(path + " rows must be nonempty");
      m.resize(rows, cols);
    }
    if (static_cast<cm::Index>(row.size()) != cols)
      throw ParseFailure(path + " rows have inconsistent lengths");
    for (cm::Index k = 0; k < cols; ++k)
      m(i, k) = require_number(row[static_cast<size_t>(k)],
                               path + "[" + std::to_string(i) + "][" +
                                   std::to_string(k) + "]");
  }
  return m;
}

Vec require_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ParseFailure(path + " must be a nonempty array of numbers");
  Vec v(static_cast<cm::Index>(j.size()));
  for (cm::Index k = 0; k < v.size(); ++k)
    v[k] = require_number(j[static_cast<size_t>(k)],
                          path + "[" + std::to_string(k) + "]");
  return v;
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (cm::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (cm::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vec& v) {
  json row = json::array();
  for (cm::Index k = 0; k < v.size(); ++k) row.push_back(v[k]);
  return row;
}

json to_json(const cm::InertiaIndex& idx) {
  json j = json::object();
  j["positivity"] = static_cast<std::int64_t>(idx.positivity);
  j["negativity"] = static_cast<std::int64_t>(idx.negativity);
  j["nullity"] = static_cast<std::int64_t>(idx.nullity);
  return j;
}

Vec parse_value_list(const std::string& text) {
  Vec out;
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ParseFailure("cannot parse value '" + item + "'");
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos])))
      ++pos;
    if (pos != item.size())
      throw ParseFailure("cannot parse value '" + item + "'");
    vals.push_back(v);
  }
  if (vals.empty()) throw ParseFailure("empty value list");
  out = Vec::Map(vals.data(), static_cast<cm::Index>(vals.size()));
  return out;
}

// Accumulates the report pieces so error paths can still emit a well-formed
// report with whatever inputs were digested before the failure.
struct Context {
  std::string command;
  json inputs = json::object();
  json tolerances = json::object();
  json notes = json::array();
  json warnings = json::array();
  bool compact = false;
  cm::Tolerances<double> tol;
};

void emit(const Context& ctx, const std::string& status, const json& tail_key_values) {
  json report;
  report["command"] = ctx.command;
  report["inputs"] = ctx.inputs;
  report["tolerances"] = ctx.tolerances;
  report["status"] = status;
  report["notes"] = ctx.notes;
  report["warnings"] = ctx.warnings;
  for (const auto& [key, value] : tail_key_values.items()) report[key] = value;
  if (ctx.compact)
    std::cout << report.dump() << "\n";
  else
    std::cout << report.dump(2) << "\n";
}

struct LoadedMetric {
  cm::Metric<double> metric;
  bool exactly_hollow_symmetric;
};

LoadedMetric load_metric(Context& ctx, const std::string& path) {
  std::string text = read_input(path);
  ctx.inputs["metric"] = fnv1a64(text);
  json j = parse_json(text, "metric file");
  if (!j.is_object() || !j.contains("n") || !j.contains("D"))
    throw ParseFailure("metric file must be an object with keys 'n' and 'D'");
  if (!j["n"].is_number_integer() || j["n"].get<std::int64_t>() < 0)
    throw ParseFailure("'n' must be a nonnegative integer");
  auto n = static_cast<cm::Index>(j["n"].get<std::int64_t>());
  Mat d = require_matrix(j["D"], "D");
  if (d.rows() != n + 1 || d.cols() != n + 1)
    throw cm::DimensionMismatch("D must be " + std::to_string(n + 1) + "x" +
                                std::to_string(n + 1) + " for n = " +
                                std::to_string(n));
  double tau_sym = ctx.tol.sym(cm::detail::max_abs(d));
  ctx.tolerances["tau_sym"] = tau_sym;
  // Pin the offending entry in the message; the library constructor would
  // reject too, but without the path.
  for (cm::Index i = 0; i <= n; ++i) {
    if (std::abs(d(i, i)) > tau_sym)
      throw cm::InvariantViolation("D[" + std::to_string(i) + "][" +
                                   std::to_string(i) + "] = " +
                                   std::to_string(d(i, i)) +
                                   " but the diagonal must be 0");
    for (cm::Index k = i + 1; k <= n; ++k)
      if (std::abs(d(i, k) - d(k, i)) > tau_sym)
        throw cm::InvariantViolation(
            "D[" + std::to_string(i) + "][" + std::to_string(k) +
            "] and D[" + std::to_string(k) + "][" + std::to_string(i) +
            "] differ by " + std::to_string(std::abs(d(i, k) - d(k, i))));
  }
  bool exact = d.diagonal().isZero(0) && d == d.transpose();
  cm::Metric<double> m(std::move(d), ctx.tol);
  if (!exact)
    ctx.notes.push_back(
        "input D canonicalized: symmetrized and diagonal zeroed");
  return LoadedMetric{std::move(m), exact};
}

std::map<std::string, Vec> load_points(Context& ctx, const std::string& path,
                                        std::vector<std::string>* order) {
  std::string text = read_input(path);
  ctx.inputs["points"] = fnv1a64(text);
  json j = parse_json(text, "point file");
  if (!j.is_object() || !j.contains("points") || !j["points"].is_object())
    throw ParseFailure("point file must be an object with a 'points' object");
  std::map<std::string, Vec> out;
  for (const auto& [name, row] : j["points"].items()) {
    out[name] = require_vector(row, "points['" + name + "']");
    if (order) order->push_back(name);
  }
  if (out.empty()) throw ParseFailure("point file lists no points");
  return out;
}

cm::Weight<double> lookup_point(const Context& ctx,
                                const std::map<std::string, Vec>& pts,
                                const std::string& name, cm::Index n) {
  auto it = pts.find(name);
  if (it == pts.end())
    throw NameLookupFailure("unknown point name '" + name + "'");
  if (it->second.size() != n + 1)
    throw cm::DimensionMismatch("point '" + name + "' has " +
                                std::to_string(it->second.size()) +
                                " coordinates, expected " +
                                std::to_string(n + 1));
  return cm::Weight<double>(it->second, ctx.tol);
}

cm::WeightMatrix<double> load_map(Context& ctx, const std::string& path) {
  std::string text = read_input(path);
  ctx.inputs["map"] = fnv1a64(text);
  json j = parse_json(text, "map file");
  if (!j.is_object() || !j.contains("map"))
    throw ParseFailure("map file must be an object with key 'map'");
  Mat c = require_matrix(j["map"], "map");
  return cm::WeightMatrix<double>(std::move(c), ctx.tol);
}

Mat load_values_matrix(Context& ctx, const std::string& path) {
  std::string text = read_input(path);
  ctx.inputs["values"] = fnv1a64(text);
  json j = parse_json(text, "values file");
  if (!j.is_object() || !j.contains("values"))
    throw ParseFailure("values file must be an object with key 'values'");
  return require_matrix(j["values"], "values");
}

double max_eig_scale(const Mat& sym) {
  if (sym.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return cm::detail::max_abs(es.eigenvalues());
}

json run_validate(Context& ctx, const std::string& metric_path) {
  LoadedMetric lm = load_metric(ctx, metric_path);
  const auto& m = lm.metric;
  Mat g = cm::hessian_restriction(m);
  ctx.tolerances["tau_eig"] = ctx.tol.eig(m.dim(), max_eig_scale(g));
  cm::InertiaIndex idx = cm::inertia(m, ctx.tol);
  json out;
  out["n"] = static_cast<std::int64_t>(m.dim());
  out["hollow_symmetric"] = lm.exactly_hollow_symmetric;
  out["inertia"] = to_json(idx);
  out["nondegenerate"] = cm::is_nondegenerate(m, ctx.tol);
  out["radical_dimension"] =
      static_cast<std::int64_t>(cm::radical_basis(m, ctx.tol).size());
  return out;
}

json run_dist(Context& ctx, const std::string& metric_path,
              const std::string& points_path, const std::string& p_name,
              const std::string& q_name) {
  LoadedMetric lm = load_metric(ctx, metric_path);
  auto pts = load_points(ctx, points_path, nullptr);
  cm::Weight<double> p = lookup_point(ctx, pts, p_name, lm.metric.dim());
  cm::Weight<double> q = lookup_point(ctx, pts, q_name, lm.metric.dim());
  double d2 = cm::sq_pseudodistance(lm.metric, p, q);
  json out;
  out["p"] = p_name;
  out["q"] = q_name;
  out["d_squared"] = d2;
  out["half_d_squared"] = d2 / 2;
  return out;
}

json run_localize(Context& ctx, const std::string& metric_path,
                  const std::string& values_text) {
  LoadedMetric lm = load_metric(ctx, metric_path);
  ctx.inputs["values"] = fnv1a64(values_text);
  Vec delta = parse_value_list(values_text);
  if (delta.size() != lm.metric.dim() + 1)
    throw cm::DimensionMismatch("expected " +
                                std::to_string(lm.metric.dim() + 1) +
                                " values, got " + std::to_string(delta.size()));
  cm::CMForm<double> form(lm.metric, ctx.tol);
  double tau_quadric =
      ctx.tol.quadric(cm::detail::max_abs(lm.metric.d_matrix()));
  ctx.tolerances["tau_pivot"] =
      ctx.tol.pivot(cm::detail::max_abs(form.matrix()));
  ctx.tolerances["tau_quadric"] = tau_quadric;
  cm::LocalizeResult<double> loc = cm::localize(form, delta, ctx.tol);
  bool on_quadric = std::abs(loc.residual) <= tau_quadric;
  if (!on_quadric)
    ctx.warnings.push_back(
        "values do not lie on the quadric: residual " +
        std::to_string(loc.residual));
  json out;
  out["values"] = to_json(delta);
  out["point"] = to_json(Vec(loc.point.entries()));
  out["beta"] = loc.beta;
  out["residual"] = loc.residual;
  out["on_quadric"] = on_quadric;
  return out;
}

json run_sphere_fit(Context& ctx, const std::string& metric_path,
                    const std::string& values_text) {
  LoadedMetric lm = load_metric(ctx, metric_path);
  ctx.inputs["values"] = fnv1a64(values_text);
  Vec values = parse_value_list(values_text);
  if (values.size() != lm.metric.dim() + 1)
    throw cm::DimensionMismatch("expected " +
                                std::to_string(lm.metric.dim() + 1) +
                                " values, got " +
                                std::to_string(values.size()));
  cm::CMForm<double> form(lm.metric, ctx.tol);
  ctx.tolerances["tau_pivot"] =
      ctx.tol.pivot(cm::detail::max_abs(form.matrix()));
  cm::SphereFitResult<double> fit = cm::sphere_fit(form, values, ctx.tol);
  json out;
  out["values"] = to_json(values);
  out["center"] = to_json(Vec(fit.center.entries()));
  out["r_squared"] = fit.r_squared;
  out["imaginary"] = fit.r_squared < 0;
  if (fit.r_squared >= 0) out["r"] = std::sqrt(fit.r_squared);
  return out;
}

json run_cm_matrix(Context& ctx, const std::string& metric_path) {
  LoadedMetric lm = load_metric(ctx, metric_path);
  cm::CMForm<double> form(lm.metric, ctx.tol);
  ctx.tolerances["tau_eig"] =
      ctx.tol.eig(form.matrix().rows(), max_eig_scale(form.matrix()));
  json out;
  out["M"] = to_json(form.matrix());
  out["signature"] = to_json(cm::cm_signature(form, ctx.tol));
  return out;
}

json run_embed(Context& ctx, const std::string& metric_path) {
  LoadedMetric lm = load_metric(ctx, metric_path);
  const auto& m = lm.metric;
  Mat g = cm::hessian_restriction(m);
  ctx.tolerances["tau_eig"] = ctx.tol.eig(m.dim(), max_eig_scale(g));
  cm::EmbedResult<double> emb = cm::embed(m, ctx.tol);
  double err = 0;
  for (cm::Index i = 0; i <= m.dim(); ++i)
    for (cm::Index j = 0; j <= m.dim(); ++j)
      err = std::max(err,
                     std::abs(emb.sq_distance(i, j) - m.d_matrix()(i, j)));
  json pts = json::array();
  for (cm::Index i = 0; i <= m.dim(); ++i)
    pts.push_back(to_json(Vec(emb.points.col(i))));
  json out;
  out["signature"] = to_json(emb.signature);
  out["sigma"] = to_json(emb.sigma);
  out["points"] = pts;
  out["reconstruction_error"] = err;
  return out;
}

json run_functorial(Context& ctx, const std::string& metric_path,
                    const std::string& map_path) {
  LoadedMetric lm = load_metric(ctx, metric_path);
  cm::WeightMatrix<double> c = load_map(ctx, map_path);
  double tau_functorial =
      ctx.tol.functorial(cm::detail::max_abs(lm.metric.d_matrix()));
  ctx.tolerances["tau_functorial"] = tau_functorial;
  cm::FunctorialityResult<double> res =
      cm::functoriality_check(lm.metric, c, ctx.tol);
  json out;
  out["D_pullback"] = to_json(res.pulled_form.metric().d_matrix());
  out["T"] = to_json(res.transport);
  out["defect"] = res.defect;
  out["within_tolerance"] = res.defect <= tau_functorial;
  return out;
}

json run_interpolate(Context& ctx, const std::string& values_path) {
  Mat s = load_values_matrix(ctx, values_path);
  ctx.tolerances["tau_sym"] = ctx.tol.sym(cm::detail::max_abs(s));
  cm::QuadFn<double> delta = cm::from_midpoint_values(s, ctx.tol);
  cm::QuadFn<double> reduced = cm::reduce_at_referential(delta, ctx.tol);
  cm::Metric<double> m = cm::metric_of(delta, ctx.tol);
  json out;
  out["Delta"] = to_json(delta.coeffs());
  out["Delta_reduced"] = to_json(reduced.coeffs());
  out["D"] = to_json(m.d_matrix());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric referentials: validation, localization and signatures"};
  app.require_subcommand(1);

  std::string metric_path, points_path, map_path, values_arg;
  std::string p_name, q_name;
  bool compact = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", compact, "compact single-line report");
  };

  CLI::App* c_validate = app.add_subcommand(
      "validate", "check a metric file and report inertia and radical");
  c_validate->add_option("--metric", metric_path, "metric JSON file or -")
      ->required();
  add_common(c_validate);

  CLI::App* c_dist = app.add_subcommand(
      "dist", "squared pseudodistance between two named points");
  c_dist->add_option("--metric", metric_path, "metric JSON file or -")
      ->required();
  c_dist->add_option("--points", points_path, "points JSON file or -")
      ->required();
  c_dist->add_option("p", p_name, "first point name")->required();
  c_dist->add_option("q", q_name, "second point name")->required();
  add_common(c_dist);

  CLI::App* c_localize = app.add_subcommand(
      "localize", "recover the point with given half squared distances");
  c_localize->add_option("--metric", metric_path, "metric JSON file or -")
      ->required();
  c_localize
      ->add_option("--values", values_arg,
                   "comma-separated half squared distances to the referential")
      ->required();
  add_common(c_localize);

  CLI::App* c_sphere = app.add_subcommand(
      "sphere-fit", "center and radius of the sphere with given values");
  c_sphere->add_option("--metric", metric_path, "metric JSON file or -")
      ->required();
  c_sphere
      ->add_option("--values", values_arg,
                   "comma-separated referential values of the sphere function")
      ->required();
  add_common(c_sphere);

  CLI::App* c_matrix = app.add_subcommand(
      "cm-matrix", "bordered pairing matrix and its signature");
  c_matrix->add_option("--metric", metric_path, "metric JSON file or -")
      ->required();
  add_common(c_matrix);

  CLI::App* c_signature = app.add_subcommand(
      "signature", "signature of the bordered pairing matrix");
  c_signature->add_option("--metric", metric_path, "metric JSON file or -")
      ->required();
  add_common(c_signature);

  CLI::App* c_embed = app.add_subcommand(
      "embed", "isometric coordinates in a diagonal pseudo-Euclidean space");
  c_embed->add_option("--metric", metric_path, "metric JSON file or -")
      ->required();
  add_common(c_embed);

  CLI::App* c_functorial = app.add_subcommand(
      "functorial", "pull back the metric along a map and check transport");
  c_functorial->add_option("--metric", metric_path, "metric JSON file or -")
      ->required();
  c_functorial->add_option("--map", map_path, "weight matrix JSON file or -")
      ->required();
  add_common(c_functorial);

  CLI::App* c_interpolate = app.add_subcommand(
      "interpolate", "quadratic function from vertex and midpoint values");
  c_interpolate
      ->add_option("--values", values_arg, "values JSON file or - (key 'values')")
      ->required();
  add_common(c_interpolate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  Context ctx;
  ctx.compact = compact;
  if (const char* env = std::getenv("CM_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) {
      std::cerr << "CM_TOL must be a positive number, got '" << env << "'\n";
      return 2;
    }
    ctx.tol.base = v;
  }
  ctx.tolerances["base"] = ctx.tol.base;

  json outputs;
  int code = 0;
  std::string error_kind, error_message;
  try {
    if (c_validate->parsed()) {
      ctx.command = "validate";
      outputs = run_validate(ctx, metric_path);
    } else if (c_dist->parsed()) {
      ctx.command = "dist";
      outputs = run_dist(ctx, metric_path, points_path, p_name, q_name);
    } else if (c_localize->parsed()) {
      ctx.command = "localize";
      outputs = run_localize(ctx, metric_path, values_arg);
    } else if (c_sphere->parsed()) {
      ctx.command = "sphere-fit";
      outputs = run_sphere_fit(ctx, metric_path, values_arg);
    } else if (c_matrix->parsed()) {
      ctx.command = "cm-matrix";
      outputs = run_cm_matrix(ctx, metric_path);
    } else if (c_signature->parsed()) {
      ctx.command = "signature";
      outputs = run_cm_matrix(ctx, metric_path);
    } else if (c_embed->parsed()) {
      ctx.command = "embed";
      outputs = run_embed(ctx, metric_path);
    } else if (c_functorial->parsed()) {
      ctx.command = "functorial";
      outputs = run_functorial(ctx, metric_path, map_path);
    } else if (c_interpolate->parsed()) {
      ctx.command = "interpolate";
      outputs = run_interpolate(ctx, values_arg);
    }
  } catch (const ParseFailure& e) {
    code = 2;
    error_kind = "parse";
    error_message = e.what();
  } catch (const cm::SingularCM& e) {
    code = 5;
    error_kind = "singular";
    error_message = e.what();
  } catch (const NameLookupFailure& e) {
    code = 4;
    error_kind = "name";
    error_message = e.what();
  } catch (const cm::DimensionMismatch& e) {
    code = 4;
    error_kind = "dimension";
    error_message = e.what();
  } catch (const cm::NotClosed& e) {
    code = 3;
    error_kind = "invariant";
    error_message = e.what();
  } catch (const cm::InvariantViolation& e) {
    code = 3;
    error_kind = "invariant";
    error_message = e.what();
  } catch (const nlohmann::json::exception& e) {
    code = 2;
    error_kind = "parse";
    error_message = e.what();
  }

  if (code == 0) {
    json tail;
    tail["outputs"] = outputs;
    emit(ctx, "ok", tail);
  } else {
    json err;
    err["exit_code"] = code;
    err["kind"] = error_kind;
    err["message"] = error_message;
    json tail;
    tail["error"] = err;
    emit(ctx, "error", tail);
    std::cerr << ctx.command << ": " << error_message << "\n";
  }
  return code;
}
