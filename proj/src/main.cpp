// Command-line driver: batch form-factor evaluation over rapidity files,
// the axiom check suite, and persistence of sampled kernel tables.
#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "artifact/axioms.hpp"
#include "artifact/formfactors.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using sgff::cplx;
using sgff::FFConfig;
using sgff::FormFactorEvaluator;
using sgff::FormFactorResult;
using sgff::ToleranceMap;
using sgff::WLineCache;

// Anything that makes the requested run unexecutable (bad flags, unreadable
// files, invalid parameters); reported on stderr with exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string signature_text(const std::vector<int>& signature) {
  std::string out;
  for (int s : signature) out.push_back(s > 0 ? '+' : '-');
  return out;
}

// ---------------------------------------------------------------------------
// Configuration: flat key=value files with the solver parameter names, then
// command-line flags on top.

struct FlagValues {
  std::string config_path;
  double xi = 0.0;
  double aob = 0.0;
  int nn = 0;
  double na = 0.0;
  int ni = 0;
  double epsilon = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  double shift_floor = 0.0;
  int jobs = 0;
  std::string signature;
  std::string input;
  std::string output;
  std::string format = "csv";
  std::string cache;
  std::string levels = "2,4,6";
  std::vector<std::string> tolerances;
  bool json_report = false;
};

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " value '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) {
    throw ConfigError("trailing characters in " + what + " value '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  const double v = parse_double(text, what);
  const int n = static_cast<int>(v);
  if (static_cast<double>(n) != v) {
    throw ConfigError(what + " must be an integer, got '" + text + "'");
  }
  return n;
}

void load_config_file(const std::string& path, FFConfig& cfg, ToleranceMap& tols) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "xi") {
      cfg.xi = parse_double(value, key);
    } else if (key == "aoverbeta") {
      cfg.a_over_beta = parse_double(value, key);
    } else if (key == "NN") {
      cfg.reg_order = parse_int(value, key);
    } else if (key == "Na") {
      cfg.series_depth = parse_double(value, key);
    } else if (key == "Ni") {
      cfg.grid_points = parse_int(value, key);
    } else if (key == "epsilon") {
      cfg.kinematic_epsilon = parse_double(value, key);
    } else if (key == "aa") {
      cfg.split = parse_double(value, key);
    } else if (key == "bb") {
      cfg.right_margin = parse_double(value, key);
    } else if (key == "shift_floor") {
      cfg.shift_floor = parse_double(value, key);
    } else if (key.rfind("tolerance.", 0) == 0) {
      tols[key.substr(10)] = parse_double(value, key);
    } else {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
}

// Registers the solver-parameter flags shared by every subcommand.
void add_config_flags(CLI::App* sub, FlagValues& fv) {
  sub->add_option("--config", fv.config_path, "key=value config file");
  sub->add_option("--xi", fv.xi, "coupling parameter xi");
  sub->add_option("--a-over-beta", fv.aob, "operator charge ratio a/beta");
  sub->add_option("--nn", fv.nn, "kernel regularization order NN");
  sub->add_option("--na", fv.na, "asymptotic series depth Na");
  sub->add_option("--ni", fv.ni, "kernel table samples per line Ni (0 = direct)");
  sub->add_option("--epsilon", fv.epsilon, "kinematic pole offset");
  sub->add_option("--aa", fv.aa, "series/quadrature split point aa");
  sub->add_option("--bb", fv.bb, "quadrature margin beyond max Re theta bb");
  sub->add_option("--shift-floor", fv.shift_floor, "boost rapidities up to this Re floor");
}

FFConfig resolve_config(const CLI::App* sub, const FlagValues& fv, ToleranceMap& tols) {
  FFConfig cfg;
  if (sub->count("--config") > 0) {
    load_config_file(fv.config_path, cfg, tols);
  }
  if (sub->count("--xi") > 0) cfg.xi = fv.xi;
  if (sub->count("--a-over-beta") > 0) cfg.a_over_beta = fv.aob;
  if (sub->count("--nn") > 0) cfg.reg_order = fv.nn;
  if (sub->count("--na") > 0) cfg.series_depth = fv.na;
  if (sub->count("--ni") > 0) cfg.grid_points = fv.ni;
  if (sub->count("--epsilon") > 0) cfg.kinematic_epsilon = fv.epsilon;
  if (sub->count("--aa") > 0) cfg.split = fv.aa;
  if (sub->count("--bb") > 0) cfg.right_margin = fv.bb;
  if (sub->count("--shift-floor") > 0) cfg.shift_floor = fv.shift_floor;
  if (!(cfg.xi > 0.0)) throw ConfigError("xi must be positive");
  if (cfg.reg_order < 1) throw ConfigError("NN must be at least 1");
  if (cfg.grid_points != 0 && cfg.grid_points < 8) {
    throw ConfigError("Ni must be 0 (direct evaluation) or at least 8");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Input: CSV rows re1,im1,...,re2n,im2n (or a JSON array of such rows).

struct InputRow {
  std::size_t line_no = 0;
  std::vector<cplx> thetas;
  std::string error;  // nonempty marks an unusable row
};

std::vector<cplx> pack_rapidities(const std::vector<double>& flat) {
  std::vector<cplx> out;
  out.reserve(flat.size() / 2);
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
    out.emplace_back(flat[i], flat[i + 1]);
  }
  return out;
}

// arity = number of particles; 0 accepts any even-length row.
std::vector<InputRow> read_input(const std::string& path, std::size_t arity) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open input file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<InputRow> rows;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return rows;
  }

  auto check_arity = [arity](InputRow& row) {
    if (arity != 0 && row.thetas.size() != arity) {
      row.error = "expected " + std::to_string(2 * arity) + " values, got " +
                  std::to_string(2 * row.thetas.size());
    } else if (arity == 0 && row.thetas.empty()) {
      row.error = "empty row";
    }
  };

  if (text[first] == '[') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("cannot parse JSON input: " + std::string(e.what()));
    }
    if (!doc.is_array()) {
      throw ConfigError("JSON input must be an array of rows");
    }
    std::size_t index = 0;
    for (const auto& entry : doc) {
      ++index;
      InputRow row;
      row.line_no = index;
      if (!entry.is_array()) {
        row.error = "row is not an array";
      } else {
        std::vector<double> flat;
        for (const auto& v : entry) {
          if (!v.is_number()) {
            row.error = "row contains a non-numeric entry";
            break;
          }
          flat.push_back(v.get<double>());
        }
        if (row.error.empty() && flat.size() % 2 != 0) {
          row.error = "odd number of values in row";
        }
        if (row.error.empty()) {
          row.thetas = pack_rapidities(flat);
          check_arity(row);
        }
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }

  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  bool past_header = false;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    InputRow row;
    row.line_no = line_no;
    std::vector<double> flat;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        flat.push_back(parse_double(field, "field"));
      } catch (const ConfigError& e) {
        row.error = std::string(e.what());
        break;
      }
    }
    // The first line may be a column header; anything unparseable later is a
    // flagged data row.
    if (!row.error.empty() && !past_header) {
      past_header = true;
      continue;
    }
    past_header = true;
    if (row.error.empty() && flat.size() % 2 != 0) {
      row.error = "odd number of values in row";
    }
    if (row.error.empty()) {
      row.thetas = pack_rapidities(flat);
      check_arity(row);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Run manifest, embedded into every output file.

struct Manifest {
  std::string command;
  FFConfig cfg;
  std::string signature;
  std::string input;
  std::string output;
  std::string format;
  int jobs = 1;
  std::string cache;
  bool cache_hit = false;
  std::size_t rows_total = 0;
  std::size_t rows_ok = 0;
  std::size_t rows_failed = 0;
  std::size_t integrals = 0;
  int dropped_zero_modes = 0;
  int pole_terms = 0;
};

json manifest_json(const Manifest& m) {
  return json{{"command", m.command},
              {"config",
               {{"xi", m.cfg.xi},
                {"aoverbeta", m.cfg.a_over_beta},
                {"NN", m.cfg.reg_order},
                {"Na", m.cfg.series_depth},
                {"Ni", m.cfg.grid_points},
                {"epsilon", m.cfg.kinematic_epsilon},
                {"aa", m.cfg.split},
                {"bb", m.cfg.right_margin},
                {"shift_floor", m.cfg.shift_floor}}},
              {"signature", m.signature},
              {"input", m.input},
              {"output", m.output},
              {"format", m.format},
              {"jobs", m.jobs},
              {"cache", m.cache},
              {"cache_hit", m.cache_hit},
              {"rows", {{"total", m.rows_total}, {"ok", m.rows_ok}, {"failed", m.rows_failed}}},
              {"diagnostics",
               {{"integrals", m.integrals},
                {"dropped_zero_modes", m.dropped_zero_modes},
                {"pole_terms", m.pole_terms}}}};
}

void write_manifest_comments(std::ostream& os, const Manifest& m) {
  os << "# artifact run manifest\n";
  os << "# command=" << m.command << "\n";
  os << "# xi=" << fmt_double(m.cfg.xi) << "\n";
  os << "# aoverbeta=" << fmt_double(m.cfg.a_over_beta) << "\n";
  os << "# NN=" << m.cfg.reg_order << "\n";
  os << "# Na=" << fmt_double(m.cfg.series_depth) << "\n";
  os << "# Ni=" << m.cfg.grid_points << "\n";
  os << "# epsilon=" << fmt_double(m.cfg.kinematic_epsilon) << "\n";
  os << "# aa=" << fmt_double(m.cfg.split) << "\n";
  os << "# bb=" << fmt_double(m.cfg.right_margin) << "\n";
  os << "# shift_floor=" << fmt_double(m.cfg.shift_floor) << "\n";
  if (!m.signature.empty()) os << "# signature=" << m.signature << "\n";
  os << "# input=" << m.input << "\n";
  os << "# format=" << m.format << "\n";
  os << "# jobs=" << m.jobs << "\n";
  os << "# cache=" << (m.cache.empty() ? "none" : m.cache)
     << " cache_hit=" << (m.cache_hit ? 1 : 0) << "\n";
  os << "# rows total=" << m.rows_total << " ok=" << m.rows_ok
     << " failed=" << m.rows_failed << "\n";
  os << "# integrals=" << m.integrals << " dropped_zero_modes=" << m.dropped_zero_modes
     << " pole_terms=" << m.pole_terms << "\n";
}

// ---------------------------------------------------------------------------
// Kernel-table cache files.

json cache_key_json(const FFConfig& cfg, const sgff::WGridPlan& plan, int points) {
  json lines = json::array();
  for (double im : plan.lines) lines.push_back(im);
  return json{{"xi", cfg.xi},
              {"NN", cfg.reg_order},
              {"Ni", points},
              {"half_width", plan.half_width},
              {"lines", lines}};
}

void save_cache_file(const std::string& path, const Manifest& m, const FFConfig& cfg,
                     const sgff::WGridPlan& plan, const WLineCache& grid) {
  json lines = json::array();
  for (const sgff::WLineSamples& s : grid.samples()) {
    json values = json::array();
    for (cplx v : s.values) {
      values.push_back(json::array({v.real(), v.imag()}));
    }
    lines.push_back(json{{"im", s.im}, {"values", std::move(values)}});
  }
  json doc{{"kind", "artifact-wtable"},
           {"manifest", manifest_json(m)},
           {"key", cache_key_json(cfg, plan, grid.points())},
           {"samples", std::move(lines)}};
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write cache file '" + path + "'");
  }
  out << doc.dump() << "\n";
}

// Returns the restored table when the file's key matches the plan exactly;
// otherwise warns on stderr and returns null so the caller evaluates afresh.
std::shared_ptr<const WLineCache> try_load_cache(const std::string& path,
                                                 const sgff::Kernel& kernel,
                                                 const FFConfig& cfg,
                                                 const sgff::WGridPlan& plan, int points,
                                                 bool& hit) {
  hit = false;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "warning: cannot open kernel table '" << path << "'; ignoring cache\n";
    return nullptr;
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    std::cerr << "warning: cannot parse kernel table '" << path << "' (" << e.what()
              << "); ignoring cache\n";
    return nullptr;
  }
  if (doc.value("kind", "") != "artifact-wtable") {
    std::cerr << "warning: '" << path << "' is not a kernel table; ignoring cache\n";
    return nullptr;
  }
  const json want = cache_key_json(cfg, plan, points);
  const json have = doc.value("key", json::object());
  auto mismatch = [&](const std::string& what) {
    std::cerr << "warning: kernel table key mismatch (" << what << "); ignoring cache\n";
    return nullptr;
  };
  if (have.value("xi", 0.0) != want["xi"].get<double>()) return mismatch("xi");
  if (have.value("NN", -1) != want["NN"].get<int>()) return mismatch("NN");
  if (have.value("Ni", -1) != want["Ni"].get<int>()) return mismatch("Ni");
  if (have.value("half_width", 0.0) != want["half_width"].get<double>()) {
    return mismatch("range");
  }
  const json& have_lines = have.contains("lines") ? have["lines"] : json::array();
  if (have_lines.size() != plan.lines.size()) return mismatch("line set");
  for (std::size_t i = 0; i < plan.lines.size(); ++i) {
    if (std::abs(have_lines[i].get<double>() - plan.lines[i]) > 1e-9) {
      return mismatch("line set");
    }
  }
  try {
    std::vector<sgff::WLineSamples> samples;
    for (const auto& entry : doc.value("samples", json::array())) {
      sgff::WLineSamples s;
      s.im = entry.value("im", 0.0);
      for (const auto& v : entry.at("values")) {
        s.values.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      }
      samples.push_back(std::move(s));
    }
    auto grid = std::make_shared<WLineCache>(kernel, std::move(samples),
                                             plan.half_width, points);
    hit = true;
    std::cerr << "kernel table cache hit: " << path << " (" << plan.lines.size()
              << " lines x " << points << " points)\n";
    return grid;
  } catch (const std::exception& e) {
    std::cerr << "warning: kernel table '" << path << "' is malformed (" << e.what()
              << "); ignoring cache\n";
    return nullptr;
  }
}

// ---------------------------------------------------------------------------
// Batch evaluation.

struct RowOutcome {
  bool ok = false;
  FormFactorResult result;
  std::string error;
};

std::vector<RowOutcome> evaluate_rows(const FFConfig& cfg, const std::vector<int>& signature,
                                      const std::vector<InputRow>& rows,
                                      std::shared_ptr<const WLineCache> grid, int jobs) {
  std::vector<RowOutcome> outcomes(rows.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].error.empty()) {
      pending.push_back(i);
    } else {
      outcomes[i].error = rows[i].error;
    }
  }
  if (pending.empty()) {
    return outcomes;
  }
  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(pending.size())));
  auto work = [&](int tid) {
    FormFactorEvaluator ev(cfg);
    ev.set_w_grid(grid);
    for (std::size_t k = tid; k < pending.size(); k += workers) {
      const std::size_t i = pending[k];
      try {
        outcomes[i].result = ev.evaluate(signature, rows[i].thetas);
        outcomes[i].ok = true;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (std::thread& t : pool) t.join();
  }
  return outcomes;
}

void write_ff_csv(std::ostream& os, const Manifest& m, const std::vector<InputRow>& rows,
                  const std::vector<RowOutcome>& outcomes, std::size_t arity) {
  write_manifest_comments(os, m);
  for (std::size_t p = 1; p <= arity; ++p) {
    os << "re" << p << ",im" << p << ",";
  }
  os << "signature,f_re,f_im,applied_shift,dropped_zero_modes,pole_terms,integrals,status\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const InputRow& row = rows[i];
    const RowOutcome& out = outcomes[i];
    for (std::size_t p = 0; p < arity; ++p) {
      if (p < row.thetas.size()) {
        os << fmt_double(row.thetas[p].real()) << "," << fmt_double(row.thetas[p].imag());
      } else {
        os << ",";
      }
      os << ",";
    }
    if (out.ok) {
      os << m.signature << "," << fmt_double(out.result.value.real()) << ","
         << fmt_double(out.result.value.imag()) << ","
         << fmt_double(out.result.applied_shift) << "," << out.result.dropped_zero_modes
         << "," << out.result.pole_terms << "," << out.result.integrals_evaluated
         << ",ok\n";
    } else {
      std::string msg = out.error;
      for (char& c : msg) {
        if (c == ',' || c == '\n') c = ';';
      }
      os << m.signature << ",,,,,,,error line " << row.line_no << ": " << msg << "\n";
    }
  }
}

json ff_rows_json(const std::vector<InputRow>& rows, const std::vector<RowOutcome>& outcomes,
                  const std::string& signature) {
  json arr = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const InputRow& row = rows[i];
    const RowOutcome& out = outcomes[i];
    json thetas = json::array();
    for (cplx t : row.thetas) {
      thetas.push_back(json::array({t.real(), t.imag()}));
    }
    json entry{{"line", row.line_no}, {"rapidities", std::move(thetas)}, {"signature", signature}};
    if (out.ok) {
      entry["f"] = {{"re", out.result.value.real()}, {"im", out.result.value.imag()}};
      entry["applied_shift"] = out.result.applied_shift;
      entry["dropped_zero_modes"] = out.result.dropped_zero_modes;
      entry["pole_terms"] = out.result.pole_terms;
      entry["integrals"] = out.result.integrals_evaluated;
      entry["status"] = "ok";
    } else {
      entry["f"] = nullptr;
      entry["status"] = "error: " + out.error;
    }
    arr.push_back(std::move(entry));
  }
  return arr;
}

void write_output_file(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write output file '" + path + "'");
  }
  out << content;
}

int run_ff(std::size_t particles, const CLI::App* sub, const FlagValues& fv) {
  ToleranceMap tols;
  FFConfig cfg = resolve_config(sub, fv, tols);
  if (fv.format != "csv" && fv.format != "json") {
    throw ConfigError("format must be csv or json");
  }
  std::vector<int> signature;
  if (sub->count("--signature") > 0) {
    signature = sgff::parse_signature(fv.signature);
    if (signature.size() != particles) {
      throw ConfigError("signature length does not match the particle count");
    }
  } else {
    signature.assign(particles, -1);
    for (std::size_t i = particles / 2; i < particles; ++i) signature[i] = +1;
  }
  if (sub->count("--input") == 0) {
    throw ConfigError("--input is required");
  }
  try {
    FormFactorEvaluator probe(cfg);  // surface parameter problems before the batch
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<InputRow> rows = read_input(fv.input, particles);

  Manifest m;
  m.command = "ff" + std::to_string(particles);
  m.signature = signature_text(signature);
  m.input = fv.input;
  m.output = fv.output;
  m.format = fv.format;
  m.jobs = fv.jobs > 0 ? fv.jobs
                       : std::max(1u, std::thread::hardware_concurrency());
  m.cache = fv.cache;

  // The sampled-kernel fast path: plan the table for the whole batch, reuse
  // a stored table when its key matches, sample it here (single-threaded)
  // otherwise.
  std::shared_ptr<const WLineCache> grid;
  if (!fv.cache.empty() || cfg.grid_points > 0) {
    std::vector<std::vector<cplx>> batch;
    for (const InputRow& row : rows) {
      if (row.error.empty()) batch.push_back(row.thetas);
    }
    if (!batch.empty()) {
      sgff::WGridPlan plan = sgff::plan_w_line_cache(cfg, batch);
      sgff::Kernel kernel(cfg.xi, cfg.reg_order);
      if (!fv.cache.empty() && cfg.grid_points == 0) {
        // Adopt the stored sampling density when the run does not set one.
        std::ifstream probe(fv.cache);
        if (probe) {
          try {
            json doc;
            probe >> doc;
            if (doc.is_object() && doc.contains("key")) {
              cfg.grid_points = doc["key"].value("Ni", 0);
            }
          } catch (const json::exception&) {
            // Leave Ni at 0; the loader below reports the unusable file.
          }
        }
      }
      if (cfg.grid_points >= 8) {
        bool hit = false;
        if (!fv.cache.empty()) {
          grid = try_load_cache(fv.cache, kernel, cfg, plan, cfg.grid_points, hit);
        }
        m.cache_hit = hit;
        if (grid == nullptr) {
          std::cerr << "sampling kernel table: " << plan.lines.size() << " lines x "
                    << cfg.grid_points << " points (half width "
                    << fmt_double(plan.half_width) << ")\n";
          grid = std::make_shared<WLineCache>(
              sgff::build_w_line_cache(kernel, cfg, batch, cfg.grid_points));
        }
      }
    }
  }

  const std::vector<RowOutcome> outcomes = evaluate_rows(cfg, signature, rows, grid, m.jobs);

  m.cfg = cfg;
  m.rows_total = rows.size();
  for (const RowOutcome& out : outcomes) {
    if (out.ok) {
      ++m.rows_ok;
      m.integrals += out.result.integrals_evaluated;
      m.dropped_zero_modes += out.result.dropped_zero_modes;
      m.pole_terms += out.result.pole_terms;
    } else {
      ++m.rows_failed;
    }
  }

  std::string content;
  if (fv.format == "csv") {
    std::ostringstream os;
    write_ff_csv(os, m, rows, outcomes, particles);
    content = os.str();
  } else {
    json doc{{"manifest", manifest_json(m)},
             {"rows", ff_rows_json(rows, outcomes, m.signature)}};
    content = doc.dump(2) + "\n";
  }
  write_output_file(fv.output, content);

  const auto t1 = std::chrono::steady_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  std::cerr << m.command << ": " << m.rows_ok << "/" << m.rows_total << " rows in " << ms
            << " ms (" << m.jobs << " jobs)\n";
  return m.rows_failed == 0 ? 0 : 1;
}

int run_check(const CLI::App* sub, const FlagValues& fv) {
  ToleranceMap tols;
  const FFConfig cfg = resolve_config(sub, fv, tols);
  for (const std::string& spec : fv.tolerances) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("tolerance override must look like axiom=value, got '" + spec + "'");
    }
    tols[spec.substr(0, eq)] = parse_double(spec.substr(eq + 1), "tolerance");
  }
  std::vector<int> levels;
  {
    std::istringstream parts(fv.levels);
    std::string piece;
    while (std::getline(parts, piece, ',')) {
      if (!piece.empty()) levels.push_back(parse_int(piece, "level"));
    }
    if (levels.empty()) {
      throw ConfigError("no check levels requested");
    }
  }

  std::vector<sgff::AxiomReport> reports;
  for (int level : levels) {
    std::vector<sgff::AxiomReport> part;
    try {
      part = sgff::run_axiom_suite(level, cfg, tols);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    reports.insert(reports.end(), part.begin(), part.end());
  }
  std::size_t passed = 0;
  for (const auto& r : reports) {
    if (r.passed) ++passed;
  }

  Manifest m;
  m.command = "check";
  m.cfg = cfg;
  m.input = fv.levels;
  m.output = fv.output;
  m.format = fv.json_report ? "json" : "text";
  m.rows_total = reports.size();
  m.rows_ok = passed;
  m.rows_failed = reports.size() - passed;

  std::string content;
  if (fv.json_report) {
    json doc{{"manifest", manifest_json(m)},
             {"reports", json::parse(sgff::reports_to_json(reports))}};
    content = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    write_manifest_comments(os, m);
    os << sgff::render_reports(reports);
    content = os.str();
  }
  write_output_file(fv.output, content);
  return m.rows_failed == 0 ? 0 : 1;
}

int run_wtable(const CLI::App* sub, const FlagValues& fv) {
  ToleranceMap tols;
  const FFConfig cfg = resolve_config(sub, fv, tols);
  if (sub->count("--input") == 0) {
    throw ConfigError("--input is required");
  }
  if (sub->count("--cache") == 0) {
    throw ConfigError("--cache is required (path of the table to write)");
  }
  const int points = cfg.grid_points;
  if (points < 8) {
    throw ConfigError("wtable needs Ni >= 8 (pass --ni)");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<InputRow> rows = read_input(fv.input, 0);
  std::vector<std::vector<cplx>> batch;
  std::size_t bad = 0;
  for (const InputRow& row : rows) {
    if (row.error.empty()) {
      batch.push_back(row.thetas);
    } else {
      std::cerr << "warning: skipping line " << row.line_no << ": " << row.error << "\n";
      ++bad;
    }
  }
  if (batch.empty()) {
    throw ConfigError("input contains no usable rapidity rows");
  }

  const sgff::WGridPlan plan = sgff::plan_w_line_cache(cfg, batch);
  const sgff::Kernel kernel(cfg.xi, cfg.reg_order);
  std::cerr << "sampling kernel table: " << plan.lines.size() << " lines x " << points
            << " points (half width " << fmt_double(plan.half_width) << ")\n";
  const WLineCache grid = sgff::build_w_line_cache(kernel, cfg, batch, points);

  Manifest m;
  m.command = "wtable";
  m.cfg = cfg;
  m.input = fv.input;
  m.output = fv.cache;
  m.format = "json";
  m.cache = fv.cache;
  m.rows_total = rows.size();
  m.rows_ok = batch.size();
  m.rows_failed = bad;
  save_cache_file(fv.cache, m, cfg, plan, grid);

  const auto t1 = std::chrono::steady_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  std::cerr << "wtable: wrote " << fv.cache << " in " << ms << " ms\n";
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized multi-soliton form factors of exponential operators"};
  app.require_subcommand(1);

  FlagValues fv;
  CLI::App* ff2 = app.add_subcommand("ff2", "two-particle form factors over an input batch");
  CLI::App* ff4 = app.add_subcommand("ff4", "four-particle form factors over an input batch");
  CLI::App* ff6 = app.add_subcommand("ff6", "six-particle form factors over an input batch");
  CLI::App* check = app.add_subcommand("check", "run the axiom and closed-form suite");
  CLI::App* wtable = app.add_subcommand("wtable", "sample a kernel table and store it");

  for (CLI::App* sub : {ff2, ff4, ff6}) {
    add_config_flags(sub, fv);
    sub->add_option("--signature", fv.signature, "charge order, e.g. --++");
    sub->add_option("--input", fv.input, "CSV or JSON rapidity rows");
    sub->add_option("--output", fv.output, "output path (default stdout)");
    sub->add_option("--format", fv.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--cache", fv.cache, "kernel table file to reuse");
    sub->add_option("--jobs", fv.jobs, "worker threads (default: hardware)");
  }
  add_config_flags(check, fv);
  check->add_option("--levels", fv.levels, "comma list of particle counts (default 2,4,6)");
  check->add_option("--tolerance", fv.tolerances, "override, e.g. cyclic=1e-6");
  check->add_flag("--json", fv.json_report, "machine-readable report");
  check->add_option("--output", fv.output, "output path (default stdout)");
  add_config_flags(wtable, fv);
  wtable->add_option("--input", fv.input, "rapidity rows the table must cover");
  wtable->add_option("--cache", fv.cache, "table file to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ff2->parsed()) return run_ff(2, ff2, fv);
    if (ff4->parsed()) return run_ff(4, ff4, fv);
    if (ff6->parsed()) return run_ff(6, ff6, fv);
    if (check->parsed()) return run_check(check, fv);
    if (wtable->parsed()) return run_wtable(wtable, fv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
