// Copyright 2026 The CBE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cbe_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "cbe/errors.hpp"
#include "cbe/evaluation.hpp"
#include "cbe/io.hpp"
#include "cbe/optimizer.hpp"
#include "cbe/report.hpp"
#include "cbe/rng.hpp"

namespace cbe::cli {
namespace {

// Preconditioner signs use a stream distinct from encoder parameters.
constexpr std::uint64_t kPreconditionStream = 0x7072'6563'6f6eULL;

struct Globals {
  unsigned threads = 1;
};

struct GenDataArgs {
  std::string kind = "gaussian";
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::size_t clusters = 32;
  double spread = 0.5;
  std::size_t queries = 0;
  std::string queries_out;
  std::string out;
};

struct TrainArgs {
  std::string method = "cbe-opt";
  std::string in;
  std::size_t k = 0;
  double lambda = 1.0;
  double mu = 0.0;
  std::string constraints;
  int iters = 10;
  double tol = 1e-4;
  std::string solver = "radial";
  std::uint64_t seed = 0;
  std::string out;
  std::string trace;
};

struct EncodeArgs {
  std::string method;
  std::string params;
  std::optional<std::uint64_t> seed;
  std::string in;
  std::size_t k = 0;
  std::string precondition = "off";
  double density = kDefaultFjltDensity;
  std::string out;
};

struct RecallArgs {
  std::string db;
  std::string queries;
  std::string codes_db;
  std::string codes_q;
  std::size_t g = 10;
  std::size_t m_max = 100;
  std::string label;
  std::string out;
};

struct AngleArgs {
  std::vector<double> theta{std::numbers::pi / 2};
  std::size_t d = 256;
  std::vector<std::size_t> k{256};
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::string out;
};

struct BenchArgs {
  std::vector<std::size_t> d_list{1024, 2048, 4096, 8192, 16384, 32768};
  std::vector<std::string> methods{"lsh", "bilinear", "cbe-rand"};
  std::size_t reps = 5;
  std::size_t warmup = 3;
  std::size_t memory_mb = 512;
  std::uint64_t seed = 0;
  std::string out;
};

// Usage errors detected after parsing; the message names the flag.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string join(const auto& values) {
  std::ostringstream s;
  bool first = true;
  for (const auto& v : values) {
    s << (first ? "" : ",") << v;
    first = false;
  }
  return s.str();
}

Method method_flag(const std::string& value) {
  try {
    return parse_method(value);
  } catch (const InvalidArgument&) {
    throw UsageError("--method: unknown method '" + value + "'");
  }
}

// Writes CSV to `path` when given, otherwise to `fallback`.
template <typename Writer>
void emit_csv(const std::string& path, std::ostream& fallback, Writer&& writer) {
  if (path.empty()) {
    writer(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  writer(file);
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

void require_flag(bool present, const char* flag) {
  if (!present) throw UsageError(std::string(flag) + " is required");
}

int gen_data(const GenDataArgs& a, std::ostream& err) {
  require_flag(!a.out.empty(), "--out");
  if (a.n == 0) throw UsageError("--n must be positive");
  if (a.d == 0) throw UsageError("--d must be positive");
  if (a.queries > 0 && a.queries_out.empty()) {
    throw UsageError("--queries requires --queries-out");
  }
  err << "gen-data: kind=" << a.kind << " n=" << a.n << " d=" << a.d
      << " seed=" << a.seed;
  if (a.kind == "clustered") err << " clusters=" << a.clusters << " spread=" << a.spread;
  err << " queries=" << a.queries << '\n';

  const std::size_t total = a.n + a.queries;
  DataMatrix all;
  if (a.kind == "gaussian") {
    all = synth_gaussian(total, a.d, a.seed);
  } else if (a.kind == "clustered") {
    if (a.clusters == 0 || a.clusters > total) {
      throw UsageError("--clusters must lie in [1, n + queries]");
    }
    all = synth_clustered(total, a.d, a.clusters, a.spread, a.seed);
  } else {
    throw UsageError("--kind: expected gaussian or clustered, got '" + a.kind + "'");
  }
  if (a.queries == 0) {
    write_matrix(a.out, all);
    return kOk;
  }
  // Every (n + queries)-th row is a query so both sets cover all clusters.
  DataMatrix db(a.n, a.d);
  DataMatrix queries(a.queries, a.d);
  const std::size_t stride = total / a.queries;
  std::size_t next_db = 0;
  std::size_t next_q = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const bool is_query = next_q < a.queries && i % stride == stride - 1;
    auto src = all.row(i);
    auto dst = is_query ? queries.row(next_q++) : db.row(next_db++);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  write_matrix(a.out, db);
  write_matrix(a.queries_out, queries);
  return kOk;
}

int train_cmd(const TrainArgs& a, const Globals& g, std::ostream& err) {
  require_flag(!a.in.empty(), "--in");
  require_flag(!a.out.empty(), "--out");
  if (a.method != "cbe-opt") {
    throw UsageError("--method: train supports only cbe-opt, got '" + a.method + "'");
  }
  OptConfig config;
  config.lambda = a.lambda;
  config.mu = a.mu;
  config.k = a.k;
  config.max_outer_iters = a.iters;
  config.objective_rel_tol = a.tol;
  config.threads = g.threads;
  if (a.solver == "radial") {
    config.solver_mode = SolverMode::kRadialExact;
  } else if (a.solver == "gd") {
    config.solver_mode = SolverMode::kGradientDescent;
  } else {
    throw UsageError("--solver: expected radial or gd, got '" + a.solver + "'");
  }
  const std::string trace_path = a.trace.empty() ? a.out + ".trace.csv" : a.trace;
  err << "train: method=cbe-opt in=" << a.in << " k=" << (a.k ? std::to_string(a.k) : "d")
      << " lambda=" << a.lambda << " mu=" << a.mu << " iters=" << a.iters
      << " tol=" << a.tol << " solver=" << a.solver << " seed=" << a.seed
      << " constraints=" << (a.constraints.empty() ? "none" : a.constraints)
      << " threads=" << g.threads << " out=" << a.out << " trace=" << trace_path
      << '\n';

  const DataMatrix x = read_matrix(a.in);
  if (!is_power_of_two(x.cols())) {
    throw DataError(a.in + ": d=" + std::to_string(x.cols()) +
                    " is not a power of two");
  }
  try {
    config.validate(x.cols());
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("--k/--lambda/--mu/--iters: ") + e.what());
  }
  PairConstraints constraints;
  if (!a.constraints.empty()) {
    constraints = read_constraints(a.constraints);
    try {
      constraints.validate(x.rows());
    } catch (const InvalidArgument& e) {
      throw DataError(a.constraints + ": " + e.what());
    }
  }
  const TrainResult result = train(x, config, constraints, a.seed);
  write_params(a.out, ParamsFile{Method::kCbeOpt, a.seed, result.params});
  emit_csv(trace_path, err, [&](std::ostream& os) {
    write_trace_csv(os, result.objective_trace);
  });
  err << "train: iterations=" << result.iterations
      << " converged=" << (result.converged ? "yes" : "no");
  if (!result.objective_trace.empty()) {
    err << " objective=" << format_number(result.objective_trace.front()) << "->"
        << format_number(result.objective_trace.back());
  }
  err << '\n';
  return kOk;
}

std::optional<std::size_t> parse_precondition(const std::string& value) {
  if (value == "off") return std::nullopt;
  constexpr std::string_view prefix = "block=";
  std::size_t block = 0;
  if (value.starts_with(prefix)) {
    const char* first = value.data() + prefix.size();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, block);
    if (ec == std::errc() && ptr == last && block > 0) return block;
  }
  throw UsageError("--precondition: expected off or block=B, got '" + value + "'");
}

EncoderParams random_params(Method method, std::size_t d, std::size_t k,
                            std::uint64_t seed, double density) {
  switch (method) {
    case Method::kCbeRand:
      return cbe_random(d, k, seed);
    case Method::kLsh:
      return lsh_random(d, k, seed);
    case Method::kBilinear:
      return bilinear_random(d, k, seed);
    case Method::kFjlt:
      return fjlt_random(d, k, density, seed);
    case Method::kCbeOpt:
      break;
  }
  throw UsageError("--method cbe-opt needs --params from train");
}

int encode_cmd(const EncodeArgs& a, const Globals& g, std::ostream& err) {
  require_flag(!a.in.empty(), "--in");
  require_flag(!a.out.empty(), "--out");
  if (a.params.empty() == !a.seed.has_value()) {
    throw UsageError("exactly one of --params or --seed is required");
  }
  const auto block = parse_precondition(a.precondition);
  const DataMatrix x = read_matrix(a.in);
  const std::size_t d = x.cols();

  ParamsFile file;
  if (!a.params.empty()) {
    file = read_params(a.params);
    if (!a.method.empty() && method_flag(a.method) != file.method) {
      throw UsageError("--method " + a.method + " does not match " + a.params +
                       " (" + std::string(method_name(file.method)) + ")");
    }
    if (file.dim() != d) {
      throw DataError(a.params + ": parameters have d=" + std::to_string(file.dim()) +
                      " but " + a.in + " has d=" + std::to_string(d));
    }
    if (a.k != 0 && a.k != file.bits()) {
      auto* circ = std::get_if<CirculantParams>(&file.params);
      if (!circ || a.k > circ->generator_count() * d) {
        throw UsageError("--k " + std::to_string(a.k) + " not available from " +
                         a.params + " (k=" + std::to_string(file.bits()) + ")");
      }
      circ->k = a.k;
    }
  } else {
    require_flag(!a.method.empty(), "--method");
    file.method = method_flag(a.method);
    file.seed = *a.seed;
    if (!(a.density > 0.0 && a.density <= 1.0)) {
      throw UsageError("--density must lie in (0, 1]");
    }
    try {
      file.params = random_params(file.method, d, a.k ? a.k : d, file.seed, a.density);
    } catch (const InvalidArgument& e) {
      throw DataError(a.in + ": " + e.what());
    }
  }
  err << "encode: method=" << method_name(file.method) << " seed=" << file.seed
      << " d=" << d << " k=" << file.bits() << " params="
      << (a.params.empty() ? "generated" : a.params)
      << " precondition=" << a.precondition << " threads=" << g.threads
      << " in=" << a.in << " out=" << a.out << '\n';

  std::unique_ptr<Encoder> encoder = make_encoder(file.params);
  if (block) {
    if (*block > d || d % *block != 0 || !is_power_of_two(*block)) {
      throw UsageError("--precondition: block " + std::to_string(*block) +
                       " must be a power of two dividing d=" + std::to_string(d));
    }
    encoder = std::make_unique<PreconditionedEncoder>(
        std::move(encoder),
        make_preconditioner(d, *block, mix_seed(file.seed, kPreconditionStream)));
  }
  write_codes(a.out, encode_matrix(*encoder, x, g.threads));
  return kOk;
}

int recall_cmd(const RecallArgs& a, const Globals& g, std::ostream& out,
               std::ostream& err) {
  require_flag(!a.db.empty(), "--db");
  require_flag(!a.queries.empty(), "--queries");
  require_flag(!a.codes_db.empty(), "--codes-db");
  require_flag(!a.codes_q.empty(), "--codes-q");
  if (a.g == 0) throw UsageError("--g must be positive");
  if (a.m_max == 0) throw UsageError("--m-max must be positive");
  const std::string label =
      a.label.empty() ? std::filesystem::path(a.codes_db).stem().string() : a.label;
  err << "eval-recall: db=" << a.db << " queries=" << a.queries
      << " codes-db=" << a.codes_db << " codes-q=" << a.codes_q << " g=" << a.g
      << " m-max=" << a.m_max << " label=" << label << " threads=" << g.threads
      << '\n';

  const DataMatrix db = read_matrix(a.db);
  const DataMatrix queries = read_matrix(a.queries);
  const BinaryCodes codes_db = read_codes(a.codes_db);
  const BinaryCodes codes_q = read_codes(a.codes_q);
  if (queries.cols() != db.cols()) {
    throw DataError(a.queries + ": d=" + std::to_string(queries.cols()) +
                    " differs from " + a.db + " d=" + std::to_string(db.cols()));
  }
  if (codes_db.size() != db.rows()) {
    throw DataError(a.codes_db + ": " + std::to_string(codes_db.size()) +
                    " codes for " + std::to_string(db.rows()) + " rows in " + a.db);
  }
  if (codes_q.size() != queries.rows()) {
    throw DataError(a.codes_q + ": " + std::to_string(codes_q.size()) +
                    " codes for " + std::to_string(queries.rows()) + " rows in " +
                    a.queries);
  }
  if (codes_q.bits() != codes_db.bits()) {
    throw DataError(a.codes_q + ": code length differs from " + a.codes_db);
  }
  if (a.g > db.rows()) throw UsageError("--g exceeds the database size");
  if (a.m_max > db.rows()) throw UsageError("--m-max exceeds the database size");

  const NeighborLists truth = ground_truth_knn(db, queries, a.g, g.threads);
  RecallCurve curve = recall_at_m(codes_db, codes_q, truth, a.m_max, g.threads);
  curve.method = label;
  emit_csv(a.out, out, [&](std::ostream& os) {
    write_recall_csv(os, std::span<const RecallCurve>(&curve, 1));
  });
  return kOk;
}

int angle_cmd(const AngleArgs& a, const Globals& g, std::ostream& out,
              std::ostream& err) {
  if (a.d < 2 || a.d % 2 != 0 || !is_power_of_two(a.d)) {
    throw UsageError("--d must be a power of two >= 2");
  }
  if (a.trials < 2) throw UsageError("--trials must be >= 2");
  for (double t : a.theta) {
    if (!(t >= 0.0 && t <= std::numbers::pi)) {
      throw UsageError("--theta values must lie in [0, pi]");
    }
  }
  for (std::size_t k : a.k) {
    if (k == 0) throw UsageError("--k values must be positive");
  }
  err << "eval-angle: theta=" << join(a.theta) << " d=" << a.d << " k=" << join(a.k)
      << " trials=" << a.trials << " seed=" << a.seed << " threads=" << g.threads
      << '\n';
  std::vector<AngleStats> stats;
  for (double theta : a.theta) {
    for (std::size_t k : a.k) {
      stats.push_back(angle_experiment(theta, a.d, k, a.trials, a.seed, g.threads));
    }
  }
  emit_csv(a.out, out, [&](std::ostream& os) { write_angle_csv(os, stats); });
  return kOk;
}

int bench_cmd(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.reps == 0) throw UsageError("--reps must be positive");
  for (std::size_t d : a.d_list) {
    if (!is_power_of_two(d)) {
      throw UsageError("--d-list: " + std::to_string(d) + " is not a power of two");
    }
  }
  std::vector<Method> methods;
  for (const auto& m : a.methods) methods.push_back(method_flag(m));
  TimingOptions options;
  options.reps = a.reps;
  options.warmup = a.warmup;
  options.memory_budget_bytes = a.memory_mb << 20;
  options.seed = a.seed;
  err << "bench: d-list=" << join(a.d_list) << " methods=" << join(a.methods)
      << " reps=" << a.reps << " warmup=" << a.warmup
      << " memory-mb=" << a.memory_mb << " seed=" << a.seed << " threads=1\n";
  const auto records = timing_bench(a.d_list, methods, options);
  emit_csv(a.out, out, [&](std::ostream& os) { write_timing_csv(os, records); });
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Circulant binary embedding toolkit", "cbe"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals globals;
  app.add_option("--threads", globals.threads, "Worker threads")
      ->check(CLI::Range(1u, 1024u));

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic data matrix");
  gen_cmd->add_option("--kind", gen.kind, "gaussian or clustered")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Database rows")->required();
  gen_cmd->add_option("--d", gen.d, "Dimension")->required();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--clusters", gen.clusters)->capture_default_str();
  gen_cmd->add_option("--spread", gen.spread)->capture_default_str();
  gen_cmd->add_option("--queries", gen.queries, "Extra rows written to --queries-out");
  gen_cmd->add_option("--queries-out", gen.queries_out);
  gen_cmd->add_option("--out", gen.out)->required();

  TrainArgs tr;
  auto* train_sub = app.add_subcommand("train", "Optimize circulant parameters");
  train_sub->add_option("--method", tr.method)->capture_default_str();
  train_sub->add_option("--in", tr.in)->required();
  train_sub->add_option("--k", tr.k, "Bits (default d)");
  train_sub->add_option("--lambda", tr.lambda)->capture_default_str();
  train_sub->add_option("--mu", tr.mu)->capture_default_str();
  train_sub->add_option("--constraints", tr.constraints);
  train_sub->add_option("--iters", tr.iters)->capture_default_str();
  train_sub->add_option("--tol", tr.tol, "Relative decrease stopping tolerance")
      ->capture_default_str();
  train_sub->add_option("--solver", tr.solver, "radial or gd")->capture_default_str();
  train_sub->add_option("--seed", tr.seed)->capture_default_str();
  train_sub->add_option("--out", tr.out)->required();
  train_sub->add_option("--trace", tr.trace, "Trace CSV (default <out>.trace.csv)");

  EncodeArgs enc;
  auto* encode_sub = app.add_subcommand("encode", "Encode a data matrix to binary codes");
  encode_sub->add_option("--method", enc.method);
  encode_sub->add_option("--params", enc.params);
  encode_sub->add_option("--seed", enc.seed);
  encode_sub->add_option("--in", enc.in)->required();
  encode_sub->add_option("--k", enc.k, "Bits (default d)");
  encode_sub->add_option("--precondition", enc.precondition, "off or block=B")
      ->capture_default_str();
  encode_sub->add_option("--density", enc.density, "FJLT nonzero fraction")
      ->capture_default_str();
  encode_sub->add_option("--out", enc.out)->required();

  RecallArgs rec;
  auto* recall_sub = app.add_subcommand("eval-recall", "Recall@m of Hamming ranking");
  recall_sub->add_option("--db", rec.db)->required();
  recall_sub->add_option("--queries", rec.queries)->required();
  recall_sub->add_option("--codes-db", rec.codes_db)->required();
  recall_sub->add_option("--codes-q", rec.codes_q)->required();
  recall_sub->add_option("--g", rec.g)->capture_default_str();
  recall_sub->add_option("--m-max", rec.m_max)->capture_default_str();
  recall_sub->add_option("--label", rec.label, "Method column (default codes file stem)");
  recall_sub->add_option("--out", rec.out);

  AngleArgs ang;
  auto* angle_sub = app.add_subcommand("eval-angle", "Angle estimator statistics");
  angle_sub->add_option("--theta", ang.theta)->delimiter(',')->capture_default_str();
  angle_sub->add_option("--d", ang.d)->capture_default_str();
  angle_sub->add_option("--k", ang.k)->delimiter(',')->capture_default_str();
  angle_sub->add_option("--trials", ang.trials)->capture_default_str();
  angle_sub->add_option("--seed", ang.seed)->capture_default_str();
  angle_sub->add_option("--out", ang.out);

  BenchArgs bench;
  auto* bench_sub = app.add_subcommand("bench", "Per-point encode timing, k = d");
  bench_sub->add_option("--d-list", bench.d_list)->delimiter(',')->capture_default_str();
  bench_sub->add_option("--methods", bench.methods)->delimiter(',')->capture_default_str();
  bench_sub->add_option("--reps", bench.reps)->capture_default_str();
  bench_sub->add_option("--warmup", bench.warmup)->capture_default_str();
  bench_sub->add_option("--memory-mb", bench.memory_mb)->capture_default_str();
  bench_sub->add_option("--seed", bench.seed)->capture_default_str();
  bench_sub->add_option("--out", bench.out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (gen_cmd->parsed()) return gen_data(gen, err);
    if (train_sub->parsed()) return train_cmd(tr, globals, err);
    if (encode_sub->parsed()) return encode_cmd(enc, globals, err);
    if (recall_sub->parsed()) return recall_cmd(rec, globals, out, err);
    if (angle_sub->parsed()) return angle_cmd(ang, globals, out, err);
    if (bench_sub->parsed()) return bench_cmd(bench, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kUsageError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cbe::cli
