#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "betasplit/continuous.hpp"
#include "betasplit/error.hpp"
#include "betasplit/oracle.hpp"
#include "betasplit/parallel.hpp"
#include "betasplit/probability.hpp"
#include "betasplit/reversal.hpp"
#include "json.hpp"
#include "verify.hpp"

using namespace betasplit;
using nlohmann::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kUsage = 2,
  kValidation = 3,
  kDomain = 4,
  kParse = 5,
  kCap = 6,
  kPrecision = 7,
  kIterationCap = 8,
  kIo = 9,
  kInternal = 10,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double alpha = 0.0;
  std::string beta_text = "0";
  double delta = 0.0;
  double lambda = 1.0;
  int leaves = 4;
  std::int64_t reps = 1;
  std::optional<std::uint64_t> seed;
  std::string resolution = "ranked-planar";
  std::string format = "csv";
  std::string out;
  // prob
  std::string tree;
  std::string perm;
  bool limit = false;
  // simulate-ct
  std::optional<std::int64_t> events;
  // verify
  std::string level = "fast";
  bool tamper = false;
  bool summary_only = false;
};

std::string num(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string csv_quote(const std::string& s) { return '"' + s + '"'; }

double parse_beta(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ValidationError("--beta: cannot parse '" + text + "'");
  }
  return value;
}

// Finite beta > -1; the processes are undefined at -1 and +inf.
SplitParams model_split(const RunConfig& c) {
  const double beta = parse_beta(c.beta_text);
  if (!std::isfinite(beta) || beta <= -1.0) {
    throw ValidationError("--beta must be finite and > -1 here; -1 and inf are limits accepted only by table1 and prob --limit");
  }
  const SplitParams p{c.alpha, beta};
  validate(p);
  return p;
}

ModelParams model(const RunConfig& c) {
  const SplitParams s = model_split(c);
  ModelParams m{s.alpha, s.beta, c.delta, c.lambda, c.leaves};
  validate(m);
  return m;
}

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw ValidationError("--seed is required for sampling commands");
  return *c.seed;
}

void check_format(const RunConfig& c) {
  if (c.format != "csv" && c.format != "json" && c.format != "newick") {
    throw ValidationError("--format must be csv, json or newick");
  }
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
};

std::vector<int> parse_perm(const std::string& text) {
  std::vector<int> perm;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size()) throw ParseError("bad permutation entry", 0);
    perm.push_back(v);
  }
  if (!is_permutation_of_1_to_n(perm)) throw ValidationError("--perm is not a permutation of 1..n-1");
  return perm;
}

// Ranks each internal node of a planar shape by preorder position.
RankedPlanarTree preorder_ranking(const BinaryTree& shape) {
  std::vector<TreeNode> nodes(shape.nodes().begin(), shape.nodes().end());
  int rank = 1;
  for (NodeId id : shape.internal_nodes()) nodes[static_cast<std::size_t>(id)].rank = rank++;
  for (TreeNode& n : nodes) n.has_interval = false;
  return RankedPlanarTree(std::move(nodes));
}

// Symmetric limits: beta -> -1 keeps only combs with fair orientation of
// each non-cherry split; beta -> inf uses the halving product.
LogReal ranked_planar_limit(const RankedPlanarTree& t, double beta) {
  if (std::isinf(beta)) return log_prob_ranked_planar_limit_inf(t);
  LogReal p = LogReal::one();
  for (SplitSizes s : t.split_profile()) {
    if (s.left > 0 && s.right > 0) return LogReal::zero();
    if (s.left + s.right > 0) p *= LogReal{-std::log(2.0)};
  }
  return p;
}

LogReal limit_probability(const std::string& text, Resolution r, double beta) {
  const double ln2 = std::log(2.0);
  switch (r) {
    case Resolution::ranked_planar:
      return ranked_planar_limit(RankedPlanarTree::from_newick(text), beta);
    case Resolution::planar: {
      const PlanarShape t = PlanarShape::from_newick(text);
      return ranked_planar_limit(preorder_ranking(t), beta) * LogReal{log_catalan_coefficient(t)};
    }
    case Resolution::ranked: {
      const RankedShape t = RankedShape::from_newick(text);
      const int n = t.leaf_count();
      const RankedPlanarTree rp(std::vector<TreeNode>(t.nodes().begin(), t.nodes().end()));
      return ranked_planar_limit(rp, beta) * LogReal{(n - 1 - cherry_count(t)) * ln2};
    }
    case Resolution::shape: {
      const TreeShape t = TreeShape::from_newick(text);
      const int n = t.leaf_count();
      const PlanarShape planar(std::vector<TreeNode>(t.nodes().begin(), t.nodes().end()));
      return ranked_planar_limit(preorder_ranking(planar), beta) *
             LogReal{log_catalan_coefficient(planar) + (n - 1 - iso_split_count(t)) * ln2};
    }
  }
  return LogReal::zero();
}

std::string tree_text(const RunConfig& c, Resolution r) {
  if (!c.perm.empty()) {
    if (!c.tree.empty()) throw ValidationError("give either --tree or --perm");
    return encode(perm_to_ranked_planar(parse_perm(c.perm)), r);
  }
  if (c.tree.empty()) throw ValidationError("prob needs --tree or --perm");
  const std::string& t = c.tree;
  if (t.front() == '{' || t.front() == '"') {
    const json j = json::parse(t, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON tree", 0);
    if (r == Resolution::ranked_planar) return ranked_planar_from_json(j).to_newick();
    const PlanarShape planar = planar_from_json(j);
    if (r == Resolution::planar) return planar.to_newick();
    if (r == Resolution::shape) return shape_of(planar).to_newick();
    throw ValidationError("JSON input at the ranked resolution must carry ranks; use Newick");
  }
  if (t.front() == '[') {
    const PlanarShape planar = PlanarShape::from_brackets(t);
    if (r == Resolution::planar) return planar.to_newick();
    if (r == Resolution::shape) return shape_of(planar).to_newick();
    throw ValidationError("bracket notation carries no ranks");
  }
  return t;
}

int cmd_prob(const RunConfig& c) {
  const Resolution r = parse_resolution(c.resolution);
  const double beta = parse_beta(c.beta_text);
  const std::string text = tree_text(c, r);
  LogReal p;
  double alpha = c.alpha;
  if (c.limit) {
    if (!(std::isinf(beta) && beta > 0) && beta != -1.0) throw ValidationError("--limit needs --beta inf or --beta -1");
    alpha = beta;
    p = limit_probability(text, r, beta);
  } else {
    const SplitParams sp = model_split(c);
    switch (r) {
      case Resolution::ranked_planar:
        p = log_prob_ranked_planar(RankedPlanarTree::from_newick(text), sp);
        break;
      case Resolution::planar:
        p = log_prob_planar(PlanarShape::from_newick(text), sp);
        break;
      case Resolution::ranked:
        p = log_prob_ranked_shape(RankedShape::from_newick(text), sp);
        break;
      case Resolution::shape:
        p = log_prob_shape(TreeShape::from_newick(text), sp);
        break;
    }
  }
  json rec = probability_record(p);
  rec["display"] = format_decimal(p, 3);
  Output out(c.out);
  if (c.format == "csv") {
    const DecimalForm d = decimal(p);
    out.stream() << "resolution,tree,alpha,beta,probability_log_e,probability_mantissa,probability_exp10\n"
                 << c.resolution << ',' << csv_quote(text) << ',' << num(alpha) << ',' << c.beta_text << ','
                 << (p.is_zero() ? std::string("-inf") : num(p.log_value)) << ',' << num(d.mantissa) << ','
                 << d.exponent10 << '\n';
  } else {
    json j{{"resolution", c.resolution}, {"tree", text}, {"alpha", alpha}, {"beta", c.beta_text}, {"probability", rec}};
    out.stream() << j.dump() << '\n';
  }
  out.finish();
  return kOk;
}

int cmd_sample(const RunConfig& c) {
  const ModelParams m = model(c);
  const std::uint64_t seed = require_seed(c);
  const Resolution r = parse_resolution(c.resolution);
  if (c.reps < 0) throw ValidationError("--reps must be >= 0");
  Output out(c.out);
  if (c.reps == 0) {
    out.finish();
    return kOk;
  }
  const auto reps = sample_replicates(m, seed, c.reps, Process::discrete);
  const auto counts = tally(reps, r);
  std::int64_t reached = 0;
  for (const auto& [k, n] : counts) reached += n;
  std::ostream& os = out.stream();
  if (c.format == "newick") {
    for (const Replicate& rep : reps) os << encode(rep.tree, r) << '\n';
  } else if (c.format == "json") {
    json j;
    j["replicates"] = json::array();
    for (std::size_t i = 0; i < reps.size(); ++i) {
      j["replicates"].push_back({{"replicate", i},
                                 {"outcome", to_string(reps[i].outcome)},
                                 {"events", reps[i].steps},
                                 {"tree", encode(reps[i].tree, r)}});
    }
    j["summary"] = json::array();
    for (const auto& [k, n] : counts) {
      j["summary"].push_back({{"encoding", k}, {"count", n}, {"frequency", double(n) / double(reached)}});
    }
    os << j.dump() << '\n';
  } else {
    if (!c.summary_only) {
      os << "replicate,outcome,events,tree\n";
      for (std::size_t i = 0; i < reps.size(); ++i) {
        os << i << ',' << to_string(reps[i].outcome) << ',' << reps[i].steps << ',' << csv_quote(encode(reps[i].tree, r))
           << '\n';
      }
      os << '\n';
    }
    os << "encoding,count,frequency\n";
    for (const auto& [k, n] : counts) os << csv_quote(k) << ',' << n << ',' << num(double(n) / double(reached)) << '\n';
  }
  out.finish();
  return kOk;
}

int cmd_simulate_ct(const RunConfig& c) {
  const ModelParams m = model(c);
  const std::uint64_t seed = require_seed(c);
  if (c.reps < 0) throw ValidationError("--reps must be >= 0");
  if (c.events && *c.events < 0) throw ValidationError("--events must be >= 0");
  const StopRule stop = c.events ? StopRule{StopAfterEvents{*c.events}} : StopRule{StopAtActiveLeaves{c.leaves}};
  std::vector<TimedTree> trees(static_cast<std::size_t>(c.reps));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16) num_threads(worker_count())
  for (std::int64_t i = 0; i < c.reps; ++i) {
    try {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
      trees[static_cast<std::size_t>(i)] = simulate_continuous(m, rng, stop);
    } catch (...) {
#pragma omp critical(cli_ct_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  Output out(c.out);
  std::ostream& os = out.stream();
  if (c.format == "newick") {
    for (const TimedTree& t : trees) os << t.to_newick() << '\n';
  } else if (c.format == "json") {
    json j = json::array();
    for (const TimedTree& t : trees) j.push_back(t.to_json());
    os << j.dump() << '\n';
  } else {
    os << "replicate,active_leaves,frozen_leaves,total_time,newick\n";
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const auto& b = trees[i].base;
      os << i << ',' << b.leaf_count() - b.frozen_count() << ',' << b.frozen_count() << ',' << num(trees[i].total_time)
         << ',' << csv_quote(trees[i].to_newick()) << '\n';
    }
  }
  out.finish();
  return kOk;
}

int cmd_dist(const RunConfig& c) {
  const SplitParams p = model_split(c);
  const ExactDistribution d = exact_distribution_parallel(c.leaves, p, parse_resolution(c.resolution));
  Output out(c.out);
  if (c.format == "csv") {
    out.stream() << d.to_csv();
  } else if (c.format == "json") {
    json j = json::array();
    for (const auto& [k, v] : d.probabilities) j.push_back({{"encoding", k}, {"probability", probability_record(v)}});
    out.stream() << j.dump() << '\n';
  } else {
    for (const auto& [k, v] : d.probabilities) out.stream() << k << ' ' << num(v.log_value) << '\n';
  }
  out.finish();
  return kOk;
}

int cmd_table1(const RunConfig& c) {
  struct Row {
    const char* beta;
    BetaCase bc;
  };
  const Row rows[] = {{"-1", BetaCase::minus_one}, {"0", BetaCase::zero}, {"inf", BetaCase::infinity}};
  Output out(c.out);
  json j = json::array();
  if (c.format == "csv") out.stream() << "beta,shape,leaves,mantissa,exponent10,display\n";
  for (const Row& row : rows) {
    for (const char* shape : {"comb", "balanced"}) {
      for (int n : {4, 8, 32, 1024}) {
        const LogReal p = std::string(shape) == "comb" ? log_prob_comb_shape(n, row.bc) : log_prob_balanced_shape(n, row.bc);
        const DecimalForm d = decimal_rounded(p, 3);
        const std::string display = format_decimal(p, 3);
        if (c.format == "csv") {
          out.stream() << row.beta << ',' << shape << ',' << n << ',' << num(d.mantissa) << ',' << d.exponent10 << ','
                       << display << '\n';
        } else {
          j.push_back({{"beta", row.beta}, {"shape", shape}, {"leaves", n}, {"mantissa", d.mantissa},
                       {"exponent10", d.exponent10}, {"display", display}});
        }
      }
    }
  }
  if (c.format != "csv") out.stream() << j.dump() << '\n';
  out.finish();
  return kOk;
}

int cmd_reverse_check(const RunConfig& c) {
  const SplitParams p = model_split(c);
  const int n = c.leaves;
  const double residual = verify_reversal(n, p);
  double row_error = 0.0;
  for (const PlanarShape& t1 : enumerate_planar_shapes(n + 1)) {
    double sum = 0.0;
    for (const PlanarShape& t : predecessors(t1)) sum += reverse_kernel(t1, t);
    row_error = std::max(row_error, std::abs(sum - 1.0));
  }
  const bool pass = residual < 1e-10 && row_error < 1e-12;
  Output out(c.out);
  if (c.format == "json") {
    out.stream() << json{{"leaves", n}, {"alpha", p.alpha}, {"beta", p.beta}, {"residual", residual},
                         {"max_row_error", row_error}, {"pass", pass}}
                        .dump()
                 << '\n';
  } else {
    out.stream() << "leaves,alpha,beta,residual,max_row_error,pass\n"
                 << n << ',' << num(p.alpha) << ',' << num(p.beta) << ',' << num(residual) << ',' << num(row_error) << ','
                 << (pass ? "true" : "false") << '\n';
  }
  out.finish();
  return pass ? kOk : kVerifyFailed;
}

int cmd_verify(const RunConfig& c) {
  if (c.level != "fast" && c.level != "full") throw ValidationError("--level must be fast or full");
  const auto results = cli::run_verify(c.level == "full" ? cli::VerifyLevel::full : cli::VerifyLevel::fast, c.tamper);
  bool all = true;
  Output out(c.out);
  json j = json::array();
  if (c.format != "json") out.stream() << "suite,status,detail\n";
  for (const auto& r : results) {
    all = all && r.passed;
    if (c.format == "json") {
      j.push_back({{"suite", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    } else {
      out.stream() << r.name << ',' << (r.passed ? "pass" : "fail") << ',' << csv_quote(r.detail) << '\n';
    }
  }
  if (c.format == "json") out.stream() << j.dump() << '\n';
  out.finish();
  return all ? kOk : kVerifyFailed;
}

void add_common(CLI::App* app, RunConfig& c, bool sampling) {
  app->add_option("--alpha", c.alpha, "left split parameter, > -1");
  app->add_option("--beta", c.beta_text, "right split parameter, > -1 (or -1/inf where limits apply)");
  app->add_option("--leaves", c.leaves, "number of leaves n");
  app->add_option("--resolution", c.resolution, "ranked-planar | planar | ranked | shape");
  app->add_option("--format", c.format, "csv | json | newick");
  app->add_option("--out", c.out, "output file (default stdout)");
  if (sampling) {
    app->add_option("--delta", c.delta, "freeze probability in [0, 1)");
    app->add_option("--lambda", c.lambda, "event rate per unit length");
    app->add_option("--reps", c.reps, "number of replicates");
    app->add_option("--seed", c.seed, "64-bit seed (required)");
  }
}

int dispatch(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Beta-splitting trees: sampling, exact probabilities and verification"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* sample = app.add_subcommand("sample", "sample trees with the discrete-time process");
  add_common(sample, c, true);
  sample->add_flag("--summary-only", c.summary_only, "csv: print only the frequency table");

  auto* prob = app.add_subcommand("prob", "exact probability of one tree");
  add_common(prob, c, false);
  prob->add_option("--tree", c.tree, "Newick, JSON or bracket tree");
  prob->add_option("--perm", c.perm, "splitting permutation, comma separated");
  prob->add_flag("--limit", c.limit, "symmetric limit model for --beta -1 or --beta inf");

  auto* dist = app.add_subcommand("dist", "exact distribution by enumeration (n <= 8)");
  add_common(dist, c, false);

  auto* table1 = app.add_subcommand("table1", "comb and balanced shape probabilities");
  table1->add_option("--format", c.format, "csv | json");
  table1->add_option("--out", c.out, "output file (default stdout)");

  auto* ct = app.add_subcommand("simulate-ct", "sample timed trees with the continuous-time process");
  add_common(ct, c, true);
  ct->add_option("--events", c.events, "stop after this many effective events instead of at --leaves");

  auto* rev = app.add_subcommand("reverse-check", "reversal identity residual at n leaves (n <= 7)");
  add_common(rev, c, false);

  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  verify->add_option("--level", c.level, "fast | full");
  verify->add_option("--format", c.format, "csv | json");
  verify->add_option("--out", c.out, "output file (default stdout)");
  verify->add_flag("--tamper", c.tamper, "perturb a reference constant (fault injection)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  check_format(c);
  if (sample->parsed()) return cmd_sample(c);
  if (prob->parsed()) return cmd_prob(c);
  if (dist->parsed()) return cmd_dist(c);
  if (table1->parsed()) return cmd_table1(c);
  if (ct->parsed()) return cmd_simulate_ct(c);
  if (rev->parsed()) return cmd_reverse_check(c);
  return cmd_verify(c);
}

}  // namespace

int main(int argc, char** argv) {
  const auto fail = [](int code, const char* kind, const std::exception& e) {
    std::cerr << kind << ": " << e.what() << '\n';
    return code;
  };
  try {
    return dispatch(argc, argv);
  } catch (const ValidationError& e) {
    return fail(kValidation, "validation error", e);
  } catch (const DomainError& e) {
    return fail(kDomain, "domain error", e);
  } catch (const ParseError& e) {
    return fail(kParse, "parse error", e);
  } catch (const CapExceededError& e) {
    return fail(kCap, "cap exceeded", e);
  } catch (const PrecisionError& e) {
    return fail(kPrecision, "precision error", e);
  } catch (const IterationCapError& e) {
    return fail(kIterationCap, "iteration cap", e);
  } catch (const IoError& e) {
    return fail(kIo, "i/o error", e);
  } catch (const nlohmann::json::exception& e) {
    return fail(kParse, "parse error", e);
  } catch (const std::exception& e) {
    return fail(kInternal, "internal error", e);
  }
}
