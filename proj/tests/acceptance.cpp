/**
 * Copyright 2026 The IPL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// Acceptance report: one PASS/FAIL line per criterion, then a summary.
// Exits 0 once every check has run; --strict exits 1 if any check failed.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "cli/commands.hpp"
#include "cli/experiment.hpp"
#include "helpers.hpp"
#include "model/checkpoint.hpp"
#include "numerics/optim.hpp"
#include "sppr/sppr.hpp"

using namespace ipl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_passed = 0, g_total = 0;

void report(const std::string &name, bool ok, const std::string &detail) {
  ++g_total;
  g_passed += ok;
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char *pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::size_t between(Rng &rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

// ---- gradient suite --------------------------------------------------------

struct Composition {
  std::vector<Tensor> weights, biases;  // backbone
  Tensor head_s_w, head_s_b, head_p_w, head_p_b;
  Tensor protos, scale;
  Tensor support, query;
  std::size_t n_way = 0, k_shot = 0;
  std::vector<std::size_t> targets;
  RefinementConfig cfg;
};

Composition random_composition(Rng &rng) {
  Composition c;
  const std::size_t in = between(rng, 2, 6), embed = between(rng, 2, 6), latent = between(rng, 2, 5);
  const std::size_t depth = between(rng, 1, 3);
  std::size_t prev = in;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t out = l + 1 == depth ? embed : between(rng, 2, 6);
    c.weights.push_back(testing::random_tensor({prev, out}, rng, 1.0 / std::sqrt(static_cast<double>(prev))));
    c.biases.push_back(testing::random_tensor({out}, rng, 0.1));
    prev = out;
  }
  c.head_s_w = testing::random_tensor({embed, latent}, rng);
  c.head_s_b = testing::random_tensor({latent}, rng, 0.5);
  c.head_p_w = testing::random_tensor({embed, latent}, rng);
  c.head_p_b = testing::random_tensor({latent}, rng, 0.5);
  const std::size_t old = between(rng, 1, 5);
  c.n_way = between(rng, 1, 3);
  c.k_shot = between(rng, 1, 3);
  c.protos = testing::random_tensor({old, embed}, rng);
  c.scale = Tensor::scalar(1.0 + 9.0 * rng.uniform());
  c.support = testing::random_tensor({c.n_way * c.k_shot, in}, rng);
  const std::size_t queries = between(rng, 1, 6);
  c.query = testing::random_tensor({queries, in}, rng);
  for (std::size_t q = 0; q < queries; ++q) c.targets.push_back(rng.below(c.n_way + old));
  c.cfg.mode = rng.below(2) ? RefinementMode::kSoftmax : RefinementMode::kRaw;
  c.cfg.temperature = c.cfg.mode == RefinementMode::kSoftmax ? 0.25 + rng.uniform() : 1.0;
  return c;
}

// Every parameter of the composition in a fixed order.
std::vector<Tensor *> parameters(Composition &c) {
  std::vector<Tensor *> out;
  for (std::size_t l = 0; l < c.weights.size(); ++l) {
    out.push_back(&c.weights[l]);
    out.push_back(&c.biases[l]);
  }
  for (Tensor *t : {&c.head_s_w, &c.head_s_b, &c.head_p_w, &c.head_p_b, &c.protos, &c.scale}) out.push_back(t);
  return out;
}

// Backbone -> per-class support means -> heads -> relation -> refinement ->
// cosine classifier -> cross-entropy. Parameter `which` is the free point.
Var composed_loss(Graph &g, Composition &c, std::size_t which, Var point) {
  const auto params = parameters(c);
  std::size_t next = 0;
  auto take = [&](const Tensor &t) { return next++ == which ? point : g.constant(t); };
  std::vector<Var> w, b;
  for (std::size_t l = 0; l < c.weights.size(); ++l) {
    w.push_back(take(c.weights[l]));
    b.push_back(take(c.biases[l]));
  }
  Var hsw = take(c.head_s_w), hsb = take(c.head_s_b), hpw = take(c.head_p_w), hpb = take(c.head_p_b);
  Var protos = take(c.protos), scale = take(c.scale);
  auto backbone = [&](Var x) {
    for (std::size_t l = 0; l < w.size(); ++l) {
      x = add_row_vector(matmul(x, w[l]), b[l]);
      if (l + 1 < w.size()) x = relu(x);
    }
    return x;
  };
  Var support = backbone(g.constant(c.support));
  const std::size_t d = support.value().dim(1);
  Var means = class_mean_embeddings(reshape(support, Shape{c.n_way, c.k_shot, d}));
  Var t_s = relu(add_row_vector(matmul(means, hsw), hsb));
  Var t_p = relu(add_row_vector(matmul(protos, hpw), hpb));
  Var refined = refine_prototypes(relation_matrix(t_s, t_p), protos, c.cfg);
  return cross_entropy(cosine_logits(backbone(g.constant(c.query)), refined, scale), c.targets);
}

void gradient_suite() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(0, "acceptance.gradients"));
  double worst = 0.0;
  int checked = 0, redrawn = 0;
  while (checked < 200) {
    Composition c = random_composition(rng);
    const auto params = parameters(c);
    std::vector<GradCheckResult> results;
    bool near_kink = false;
    for (std::size_t i = 0; i < params.size() && !near_kink; ++i) {
      const auto r = grad_check_detailed([&](Graph &g, Var p) { return composed_loss(g, c, i, p); }, *params[i]);
      // a relu input this close to zero may put a kink inside the stencil
      near_kink = r.relu_margin < 1e-3;
      results.push_back(r);
    }
    if (near_kink) {
      ++redrawn;
      continue;
    }
    for (const auto &r : results) worst = std::max(worst, r.max_relative_error);
    ++checked;
  }
  const double secs = seconds_since(t0);
  report("gradient-suite", worst <= 1e-4 && secs <= 30.0,
         fmt("200 compositions, every parameter tensor, max rel err %.3e (<= 1e-4), %.2f s (<= 30 s), %d redrawn near a relu kink",
             worst, secs, redrawn));
}

// ---- refinement oracle ----------------------------------------------------

void refinement_oracle() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(0, "acceptance.oracle"));
  double worst_raw = 0.0, worst_soft = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t old = between(rng, 1, 8), fresh = between(rng, 1, 4), d = between(rng, 1, 16),
                      latent = between(rng, 1, 16);
    const Tensor emb = testing::random_tensor({fresh, d}, rng), protos = testing::random_tensor({old, d}, rng);
    ProjectionHeads heads;
    heads.head_s = Linear{testing::random_tensor({d, latent}, rng), testing::random_tensor({latent}, rng, 0.3)};
    heads.head_p = Linear{testing::random_tensor({d, latent}, rng), testing::random_tensor({latent}, rng, 0.3)};
    std::vector<int> old_ids(old), new_ids(fresh);
    std::iota(old_ids.begin(), old_ids.end(), 0);
    std::iota(new_ids.begin(), new_ids.end(), 100);
    const PrototypeBank bank(protos, old_ids, Tensor::scalar(10.0));

    const auto t_s = oracle::relu(oracle::affine(testing::to_mat(emb), testing::to_mat(heads.head_s.weight),
                                                 heads.head_s.bias.values()));
    const auto t_p = oracle::relu(oracle::affine(testing::to_mat(protos), testing::to_mat(heads.head_p.weight),
                                                 heads.head_p.bias.values()));
    const auto corr = oracle::relation(t_s, t_p);
    for (RefinementMode mode : {RefinementMode::kRaw, RefinementMode::kSoftmax}) {
      RefinementConfig cfg;
      cfg.mode = mode;
      const bool soft = mode == RefinementMode::kSoftmax;
      const Tensor got = refine(bank, emb, new_ids, heads, cfg).prototypes();
      const double err = testing::max_abs_diff(testing::to_mat(got),
                                               oracle::refine(corr, testing::to_mat(protos), soft, cfg.temperature));
      (soft ? worst_soft : worst_raw) = std::max(soft ? worst_soft : worst_raw, err);
    }
  }
  const double secs = seconds_since(t0);
  report("refinement-oracle", worst_raw <= 1e-10 && worst_soft <= 1e-10 && secs <= 5.0,
         fmt("100 instances, max abs err raw %.3e, softmax %.3e (<= 1e-10), %.2f s (<= 5 s)", worst_raw, worst_soft,
             secs));
}

// ---- relation matrix properties --------------------------------------------

void relation_properties() {
  Rng rng(derive_seed(0, "acceptance.relation"));
  double worst_range = 0.0, worst_scale = 0.0;
  int permutation_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = between(rng, 1, 6), m = between(rng, 1, 8), l = between(rng, 1, 12);
    Tensor t_s = testing::random_tensor({n, l}, rng), t_p = testing::random_tensor({m, l}, rng);
    std::vector<int> new_ids(n), old_ids(m);
    std::iota(new_ids.begin(), new_ids.end(), 0);
    std::iota(old_ids.begin(), old_ids.end(), 100);
    const RelationMatrix c = relation_matrix(t_s, t_p, new_ids, old_ids);
    for (double v : c.values.values()) worst_range = std::max(worst_range, std::abs(v) - 1.0);

    const double k = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
    Tensor s2 = t_s, p2 = t_p;
    for (double &v : s2.values()) v *= k;
    for (double &v : p2.values()) v *= k;
    worst_scale = std::max(worst_scale, testing::max_abs_diff(c.values, relation_matrix(s2, p2, new_ids, old_ids).values));

    // permuting the new classes permutes the new columns and refined rows exactly
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Tensor ps(t_s.shape());
    std::vector<int> pids(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(t_s.row(perm[i]).begin(), t_s.row(perm[i]).end(), ps.row(i).begin());
      pids[i] = new_ids[perm[i]];
    }
    const RelationMatrix cp = relation_matrix(ps, t_p, pids, old_ids);
    const Tensor protos = testing::random_tensor({m, l}, rng);
    const RefinementConfig cfg;
    const Tensor r0 = refine_prototypes(c, protos, cfg), r1 = refine_prototypes(cp, protos, cfg);
    bool exact = true;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) exact &= cp.values.at(i, j) == c.values.at(i, perm[j]);
      for (std::size_t j = 0; j < m; ++j) exact &= cp.values.at(i, n + j) == c.values.at(i, n + j);
    }
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t col = 0; col < l; ++col) exact &= r1.at(j, col) == r0.at(perm[j], col);
    permutation_failures += !exact;
  }
  report("relation-properties", worst_range <= 1e-9 && worst_scale <= 1e-12 && permutation_failures == 0,
         fmt("1000 instances, max |corr| - 1 = %.3e (<= 1e-9), scale drift %.3e (<= 1e-12), %d permutation mismatches",
             worst_range, worst_scale, permutation_failures));
}

// ---- benchmark-level criteria ---------------------------------------------

const AblationCell &cell(const std::vector<AblationCell> &cells, const std::string &name) {
  for (const auto &c : cells) {
    if (c.variant.name == name) return c;
  }
  throw StateError("no ablation variant " + name);
}

double mean_misassigned(const RunResult &r) {
  return std::accumulate(r.final_misassigned.begin(), r.final_misassigned.end(), 0.0) /
         static_cast<double>(r.final_misassigned.size());
}

void benchmark_criteria() {
  const ExperimentConfig cfg;  // the default seeded benchmark
  const auto t0 = Clock::now();
  const Benchmark bench = make_benchmark(cfg);
  const auto cells = run_ablation(cfg, bench);
  const double secs = seconds_since(t0);
  const double pct = 100.0;
  auto avg = [&](const char *name) { return pct * cell(cells, name).result.report.average_accuracy; };

  const double full = avg("ress+sppr"), sppr = avg("sppr"), ft = avg("ft");
  report("method-ordering", full >= ft + 5.0 && sppr >= ft && secs <= 120.0,
         fmt("ress+sppr %.2f vs ft %.2f + 5; sppr %.2f vs ft %.2f; all 9 variants in %.1f s (<= 120 s)", full, ft, sppr,
             ft, secs));

  const double zero = avg("ress+zero"), rnd = avg("ress+random"), mean = avg("ress+mean");
  report("init-baselines", full >= zero + 10.0 && full >= rnd + 10.0,
         fmt("ress+sppr %.2f vs zero %.2f + 10 and random %.2f + 10; mean-init %.2f (recorded, %s)", full, zero, rnd,
             mean, full >= mean ? "sppr >= mean" : "sppr < mean"));

  const RunResult &refined = cell(cells, "ress+sppr").result;
  double first = 0.0, all = 0.0, lowest = 1.0;
  std::size_t all_n = 0;
  for (const auto &trial : refined.report.trials) {
    first += trial.similarity.front().mean / static_cast<double>(refined.report.trials.size());
    for (const auto &s : trial.similarity) {
      all += s.mean;
      ++all_n;
      for (double v : s.cosine) lowest = std::min(lowest, v);
    }
  }
  all /= static_cast<double>(all_n);
  report("prototype-stability", first >= 0.9,
         fmt("mean cosine of old prototypes across the first refinement %.4f (>= 0.9); all sessions %.4f, min %.4f",
             first, all, lowest));

  const double ft_mis = mean_misassigned(cell(cells, "ft").result), sppr_mis = mean_misassigned(refined);
  report("old-class-misassignment", ft_mis > 0.5 && sppr_mis < 0.25,
         fmt("final session, base-class test samples sent to incremental classes: ft %.3f (> 0.5), ress+sppr %.3f (< 0.25); "
             "ress+ft %.3f, sppr %.3f",
             ft_mis, sppr_mis, mean_misassigned(cell(cells, "ress+ft").result),
             mean_misassigned(cell(cells, "sppr").result)));
}

// ---- protocol invariants ---------------------------------------------------

void protocol_invariants() {
  Rng meta(derive_seed(0, "acceptance.schedules"));
  int built = 0, violations = 0;
  while (built < 100) {
    const std::size_t base = between(meta, 1, 8), ways = between(meta, 1, 4), sessions = between(meta, 0, 6);
    const std::size_t shots = between(meta, 1, 5), per_class = shots + between(meta, 2, 12);
    const std::size_t classes = base + ways * sessions + meta.below(4);
    // column 0 tags each row with its global index
    Tensor x(Shape{classes * per_class, 2});
    std::vector<int> y;
    for (std::size_t i = 0; i < x.dim(0); ++i) {
      x.at(i, 0) = static_cast<double>(i);
      y.push_back(static_cast<int>(i / per_class));
    }
    const Dataset data(x, y);
    Rng rng(meta.next());
    SessionSchedule s;
    try {
      s = build_schedule(data, ScheduleConfig{base, ways, shots, sessions, 0.15 + 0.4 * meta.uniform()}, rng);
    } catch (const DataError &) {
      continue;  // split infeasible for this draw
    }
    ++built;
    auto tags = [](const Dataset &d) {
      std::set<double> t;
      for (std::size_t r = 0; r < d.size(); ++r) t.insert(d.features().at(r, 0));
      return t;
    };
    bool ok = true;
    std::set<int> seen;
    for (std::size_t sess = 1; sess <= s.session_count(); ++sess) {
      for (int c : s.classes_of(sess)) ok &= seen.insert(c).second;
      std::vector<int> through = s.classes_through(sess);
      std::sort(through.begin(), through.end());
      ok &= s.cumulative_test(sess).classes() == through;
    }
    auto disjoint = [&](const Dataset &a, const Dataset &b) {
      const auto ta = tags(a), tb = tags(b);
      for (double t : ta) ok &= !tb.count(t);
    };
    disjoint(s.base_train, s.base_test);
    for (const auto &inc : s.increments) {
      disjoint(inc.pool, inc.test);
      for (int c : inc.classes) ok &= inc.train.indices_of(c).size() == shots;
      const auto pool = tags(inc.pool), drawn = tags(inc.train);
      ok &= std::includes(pool.begin(), pool.end(), drawn.begin(), drawn.end());
    }
    try {
      s.validate();
    } catch (const DataError &) {
      ok = false;
    }
    violations += !ok;
  }
  report("protocol-invariants", violations == 0,
         fmt("%d schedules, %d violating disjointness, coverage, exact shots or split separation", built, violations));
}

// ---- determinism and round trips -------------------------------------------

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(const fs::path &work) {
  ExperimentConfig cfg;
  cfg.out = (work / "run_a").string();
  cmd_run(cfg);
  cfg.out = (work / "run_b").string();
  cmd_run(cfg);
  const std::string a = slurp(work / "run_a" / "report.json"), b = slurp(work / "run_b" / "report.json");
  report("determinism", !a.empty() && a == b,
         fmt("two default runs, report.json %zu bytes, %s", a.size(), a == b ? "byte identical" : "DIFFERENT"));
}

void round_trips(const fs::path &work) {
  Rng rng(derive_seed(0, "acceptance.roundtrip"));
  Dataset data = generate_gaussian_mixture(5, 7, 9, 4.0, 1.0, rng);
  Tensor x = data.features();
  x.at(0, 0) = 0.1;
  x.at(1, 0) = -0.0;
  x.at(2, 0) = 4.9e-324;
  x.at(3, 0) = 1.7976931348623157e308;
  data = Dataset(x, data.labels());
  const std::string csv = (work / "data.csv").string();
  save_csv(data, csv);
  const Dataset back = load_csv(csv);
  const bool csv_ok = back.features().same_values(data.features()) && back.labels() == data.labels();

  ModelConfig mc;
  mc.input_dim = 7;
  Model model = init_params(mc, std::vector<int>{4, 0, 2}, rng);
  model.bank.prototypes().at(0, 0) = -0.0;
  const std::string ckpt = (work / "model.bin").string();
  save_checkpoint(ckpt, model_to_tensors(model));
  const NamedTensors a = model_to_tensors(model), b = model_to_tensors(model_from_tensors(load_checkpoint(ckpt)));
  bool ckpt_ok = a.size() == b.size();
  for (std::size_t i = 0; ckpt_ok && i < a.size(); ++i) ckpt_ok = a[i].first == b[i].first && a[i].second.same_values(b[i].second);
  report("round-trips", csv_ok && ckpt_ok,
         fmt("csv %s, checkpoint %s (bitwise, incl. -0, subnormal and max double)", csv_ok ? "lossless" : "LOSSY",
             ckpt_ok ? "lossless" : "LOSSY"));
}

}  // namespace

int main(int argc, char **argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict |= std::strcmp(argv[i], "--strict") == 0;
  set_log_level("quiet");
  const fs::path work = fs::temp_directory_path() / "ipl_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<const char *, std::function<void()>>> checks = {
      {"gradient-suite", gradient_suite},
      {"refinement-oracle", refinement_oracle},
      {"relation-properties", relation_properties},
      {"benchmark", benchmark_criteria},
      {"protocol-invariants", protocol_invariants},
      {"determinism", [&] { determinism(work); }},
      {"round-trips", [&] { round_trips(work); }},
  };
  for (const auto &[name, fn] : checks) {
    try {
      fn();
    } catch (const std::exception &e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d/%d passed\n", g_passed, g_total);
  return strict && g_passed != g_total ? 1 : 0;
}
