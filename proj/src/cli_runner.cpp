#include "riccikit/cli_runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace riccikit {

namespace {

[[noreturn]] void schema(const std::string& message) { throw Error(ErrorCode::SchemaViolation, message); }

const std::set<std::string> kExperimentKeys = {"suite", "id",     "measure",  "body",     "target", "params",
                                               "dims",  "samples", "bootstrap", "seed",   "rel_tol", "functions",
                                               "out",   "format"};
const std::set<std::string> kSuiteKeys = {"name", "experiments", "samples", "bootstrap", "seed", "rel_tol"};

std::string at(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }

int positive_int(const Json& v, const std::string& where, int minimum) {
  if (!v.is_number_integer() || v.get<long long>() < minimum) {
    schema(where + ": expected an integer >= " + std::to_string(minimum));
  }
  return v.get<int>();
}

// Re-raises schema errors from the spec parsers under `pointer`.
template <typename F>
void with_prefix(const std::string& pointer, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SchemaViolation) throw;
    std::string msg = e.what();
    const std::string tag = std::string(to_string(ErrorCode::SchemaViolation)) + ": ";
    if (msg.rfind(tag, 0) == 0) msg = msg.substr(tag.size());
    schema(pointer + msg);
  }
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& v) { return v.is_null() ? std::nan("") : v.get<double>(); }

}  // namespace

ExperimentConfig parse_config(const Json& doc, const std::string& pointer) {
  if (!doc.is_object()) schema(pointer + ": expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!kExperimentKeys.count(it.key())) schema(at(pointer, it.key()) + ": unknown key");
  }
  ExperimentConfig c;
  if (!doc.contains("id") || !doc["id"].is_string()) schema(at(pointer, "id") + ": expected a string");
  c.id = doc["id"].get<std::string>();
  const CatalogEntry* entry = nullptr;
  for (const CatalogEntry& e : catalog()) {
    if (e.id == c.id) entry = &e;
  }
  if (!entry) throw Error(ErrorCode::UnknownInequalityId, at(pointer, "id") + ": unknown inequality '" + c.id + "'");

  if (doc.contains("suite")) {
    if (!doc["suite"].is_string()) schema(at(pointer, "suite") + ": expected a string");
    c.suite = doc["suite"].get<std::string>();
  }
  if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty()) {
    schema(at(pointer, "dims") + ": expected a non-empty array of integers");
  }
  for (std::size_t k = 0; k < doc["dims"].size(); ++k) {
    const std::string where = at(pointer, "dims/" + std::to_string(k));
    const int d = positive_int(doc["dims"][k], where, 1);
    if (d < entry->min_dim || d > entry->max_dim) {
      if (c.id == "hardy_boundary") schema(where + ": hardy_boundary requires d >= 6 (small-dimension condition)");
      schema(where + ": " + c.id + " requires " + std::to_string(entry->min_dim) + " <= d <= " +
             std::to_string(entry->max_dim));
    }
    c.dims.push_back(d);
  }
  if (doc.contains("samples")) c.samples = positive_int(doc["samples"], at(pointer, "samples"), 100);
  if (doc.contains("bootstrap")) c.bootstrap = positive_int(doc["bootstrap"], at(pointer, "bootstrap"), 2);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0)) {
      schema(at(pointer, "seed") + ": expected a non-negative integer");
    }
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("rel_tol")) {
    if (!doc["rel_tol"].is_number() || doc["rel_tol"].get<double>() < 0.0) {
      schema(at(pointer, "rel_tol") + ": expected a non-negative number");
    }
    c.rel_tol = doc["rel_tol"].get<double>();
  }
  if (doc.contains("functions")) {
    if (!doc["functions"].is_array()) schema(at(pointer, "functions") + ": expected an array of strings");
    for (std::size_t k = 0; k < doc["functions"].size(); ++k) {
      if (!doc["functions"][k].is_string()) schema(at(pointer, "functions/" + std::to_string(k)) + ": expected a string");
      c.functions.push_back(doc["functions"][k].get<std::string>());
    }
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) schema(at(pointer, "out") + ": expected a string");
    c.out = doc["out"].get<std::string>();
  }
  if (doc.contains("format")) {
    if (doc["format"] != "csv" && doc["format"] != "json") schema(at(pointer, "format") + ": expected \"csv\" or \"json\"");
    c.format = doc["format"].get<std::string>();
  }
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) schema(at(pointer, "params") + ": expected an object");
    c.params = doc["params"];
  }
  for (const char* key : {"measure", "body", "target"}) {
    if (doc.contains(key)) c.params[key] = doc[key];
  }
  // Shape checks of the nested specs in the first dimension.
  const int d0 = c.dims.front();
  if (c.params.contains("body")) with_prefix(pointer, [&] { body_from_json(c.params["body"], d0); });
  if (c.params.contains("measure")) {
    const Json body = c.params.contains("body") ? c.params["body"] : Json();
    with_prefix(pointer, [&] { measure_from_json(c.params["measure"], d0, body); });
  }
  if (c.params.contains("target")) {
    try {
      measure_from_json(c.params["target"], d0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SchemaViolation) throw;
      schema(at(pointer, "target") + ": " + e.what());
    }
  }
  return c;
}

SuiteConfig parse_suite(const Json& doc) {
  SuiteConfig s;
  if (!doc.is_object()) schema(": expected an object");
  if (!doc.contains("experiments")) {
    s.experiments.push_back(parse_config(doc));
    s.name = s.experiments.front().suite;
    return s;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!kSuiteKeys.count(it.key())) schema("/" + it.key() + ": unknown key");
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) schema("/name: expected a string");
    s.name = doc["name"].get<std::string>();
  }
  if (!doc["experiments"].is_array() || doc["experiments"].empty()) schema("/experiments: expected a non-empty array");
  for (std::size_t k = 0; k < doc["experiments"].size(); ++k) {
    Json member = doc["experiments"][k];
    if (member.is_object()) {
      for (const char* key : {"samples", "bootstrap", "seed", "rel_tol"}) {
        if (doc.contains(key) && !member.contains(key)) member[key] = doc[key];
      }
      if (!member.contains("suite")) member["suite"] = s.name;
    }
    s.experiments.push_back(parse_config(member, "/experiments/" + std::to_string(k)));
  }
  return s;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    schema(": invalid JSON in " + path + " (" + e.what() + ")");
  }
}

VerificationReport run_config(const ExperimentConfig& config, int workers) {
  VerificationReport report;
  for (int d : config.dims) {
    EngineOptions o;
    o.samples = config.samples;
    o.bootstrap = config.bootstrap;
    o.rel_tol = config.rel_tol;
    o.seed = config.seed;
    o.workers = workers;
    o.suite = config.suite;
    o.functions = config.functions;
    try {
      const InequalityInstance in = instantiate(config.id, d, config.params, config.seed);
      const VerificationReport part = check_inequality(in, o);
      report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
    } catch (const Error& e) {
      ReportRow row;
      row.suite = config.suite;
      row.inequality = config.id;
      row.dim = d;
      row.function = "*";
      const double nan = std::nan("");
      row.lhs = row.lhs_err = row.rhs = row.rhs_err = row.slack = nan;
      row.status = "error";
      row.seed = config.seed;
      row.n = config.samples;
      row.message = e.what();
      report.rows.push_back(row);
    }
  }
  return report;
}

VerificationReport run_suite(const SuiteConfig& suite, int workers) {
  VerificationReport report;
  for (const ExperimentConfig& c : suite.experiments) {
    const VerificationReport part = run_config(c, workers);
    report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
  }
  return report;
}

std::string report_csv(const VerificationReport& report) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const ReportRow& r : report.rows) {
    os << csv_field(r.suite) << ',' << csv_field(r.inequality) << ',' << r.dim << ',' << csv_field(r.function) << ','
       << csv_number(r.lhs) << ',' << csv_number(r.lhs_err) << ',' << csv_number(r.rhs) << ','
       << csv_number(r.rhs_err) << ',' << csv_number(r.slack) << ',' << r.status << ',' << r.seed << ',' << r.n
       << "\n";
  }
  return os.str();
}

Json report_json(const VerificationReport& report) {
  Json rows = Json::array();
  for (const ReportRow& r : report.rows) {
    Json hyps = Json::array();
    for (const HypothesisResult& h : r.hypotheses) {
      Json loc = Json::array();
      for (int i = 0; i < h.location.size(); ++i) loc.push_back(h.location(i));
      hyps.push_back({{"name", h.name}, {"margin", number_or_null(h.margin)}, {"passed", h.passed}, {"location", loc}});
    }
    rows.push_back({{"suite", r.suite},
                    {"inequality", r.inequality},
                    {"dim", r.dim},
                    {"function", r.function},
                    {"lhs", number_or_null(r.lhs)},
                    {"lhs_err", number_or_null(r.lhs_err)},
                    {"rhs", number_or_null(r.rhs)},
                    {"rhs_err", number_or_null(r.rhs_err)},
                    {"slack", number_or_null(r.slack)},
                    {"status", r.status},
                    {"seed", r.seed},
                    {"n", r.n},
                    {"message", r.message},
                    {"hypotheses", hyps}});
  }
  return Json{{"rows", rows}};
}

VerificationReport report_from_json(const Json& doc) {
  VerificationReport report;
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array()) schema("/rows: expected an array");
  for (const Json& j : doc["rows"]) {
    ReportRow r;
    r.suite = j.at("suite").get<std::string>();
    r.inequality = j.at("inequality").get<std::string>();
    r.dim = j.at("dim").get<int>();
    r.function = j.at("function").get<std::string>();
    r.lhs = number_from(j.at("lhs"));
    r.lhs_err = number_from(j.at("lhs_err"));
    r.rhs = number_from(j.at("rhs"));
    r.rhs_err = number_from(j.at("rhs_err"));
    r.slack = number_from(j.at("slack"));
    r.status = j.at("status").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n = j.at("n").get<long>();
    r.message = j.value("message", std::string());
    for (const Json& h : j.value("hypotheses", Json::array())) {
      HypothesisResult hr;
      hr.name = h.at("name").get<std::string>();
      hr.margin = number_from(h.at("margin"));
      hr.passed = h.at("passed").get<bool>();
      const Json& loc = h.at("location");
      hr.location.resize(static_cast<Eigen::Index>(loc.size()));
      for (std::size_t i = 0; i < loc.size(); ++i) hr.location(static_cast<Eigen::Index>(i)) = loc[i].get<double>();
      r.hypotheses.push_back(hr);
    }
    report.rows.push_back(r);
  }
  return report;
}

void emit_report(const VerificationReport& report, const std::string& format, const std::string& path) {
  if (report.rows.empty()) throw Error(ErrorCode::InvalidArgument, "empty report");
  std::string text;
  if (format == "csv") {
    text = report_csv(report);
  } else if (format == "json") {
    text = report_json(report).dump(2) + "\n";
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown report format '" + format + "'");
  }
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + path);
}

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::SchemaViolation || code == ErrorCode::UnknownInequalityId ? 2 : 3;
}

}  // namespace riccikit
