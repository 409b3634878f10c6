// Copyright 2026 The subvoc Authors.
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

#include "subvoc/significance.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "subvoc/error.h"

namespace subvoc {

namespace {

// Uniform value in [0, n) by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double resampled_score(Metric metric, std::span<const SegmentStats> segs,
                       std::span<const std::uint32_t> indices,
                       const MetricOptions& options) {
  switch (metric) {
    case Metric::kBleu: {
      NGramStats total;
      for (std::uint32_t i : indices) total += segs[i].bleu;
      return bleu_from_stats(total);
    }
    case Metric::kTer: {
      TerStats total;
      for (std::uint32_t i : indices) total += segs[i].ter;
      return ter_from_stats(total);
    }
    case Metric::kChrf: {
      ChrfStats total;
      const std::size_t order = segs.empty() ? 0 : segs[0].chrf.hyp.size();
      total.hyp.assign(order, 0);
      total.ref.assign(order, 0);
      total.match.assign(order, 0);
      for (std::uint32_t i : indices) total += segs[i].chrf;
      return chrf_from_stats(total, options.beta);
    }
  }
  return 0;
}

void check_pair(std::span<const SegmentStats> a, std::span<const SegmentStats> b) {
  if (a.size() != b.size()) throw LineCountMismatch(a.size(), b.size());
  if (a.empty()) throw EmptyTestSet("no segments to resample");
}

}  // namespace

std::vector<std::uint32_t> draw_indices(std::size_t segments,
                                        const BootstrapOptions& options) {
  if (segments == 0) throw EmptyTestSet("no segments to resample");
  std::mt19937_64 rng(options.seed);
  std::vector<std::uint32_t> out(options.iterations * options.sample_size);
  for (auto& v : out) v = static_cast<std::uint32_t>(uniform_below(rng, segments));
  return out;
}

BootstrapResult bootstrap_with_indices(std::span<const SegmentStats> a,
                                       std::span<const SegmentStats> b,
                                       Metric metric,
                                       const MetricOptions& metric_options,
                                       std::span<const std::uint32_t> indices,
                                       const BootstrapOptions& options) {
  check_pair(a, b);
  if (options.iterations == 0 || options.sample_size == 0) {
    throw InvalidConfig("bootstrap needs at least one iteration and sample");
  }
  if (indices.size() != options.iterations * options.sample_size) {
    throw InvalidConfig("index stream does not match iterations * sample size");
  }
  BootstrapResult r;
  r.metric = metric;
  r.iterations = options.iterations;
  r.sample_size = options.sample_size;
  r.seed = options.seed;
  r.score_a = score_from_stats(metric, sum_segments(a), metric_options);
  r.score_b = score_from_stats(metric, sum_segments(b), metric_options);
  r.delta = r.score_a - r.score_b;

  std::vector<double> diffs(options.iterations);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t it = begin; it < end; ++it) {
      auto sample = indices.subspan(it * options.sample_size, options.sample_size);
      diffs[it] = resampled_score(metric, a, sample, metric_options) -
                  resampled_score(metric, b, sample, metric_options);
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(options.threads, 1, options.iterations);
  if (threads == 1) {
    work(0, options.iterations);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (options.iterations + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(options.iterations, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  if (r.delta == 0.0) {
    r.degenerate = true;
    r.p_value = 1.0;
    r.significant = false;
  } else {
    const double sign = r.delta > 0 ? 1.0 : -1.0;
    const auto contrary = std::count_if(diffs.begin(), diffs.end(),
                                        [&](double d) { return d * sign <= 0.0; });
    r.p_value = std::min(1.0, 2.0 * static_cast<double>(contrary) /
                                  static_cast<double>(options.iterations));
    r.significant = r.p_value < kAlpha;
  }

  std::sort(diffs.begin(), diffs.end());
  const std::size_t n = diffs.size();
  const auto lo = static_cast<std::size_t>(std::floor(0.025 * n));
  const auto hi_end = static_cast<std::size_t>(std::ceil(0.975 * n));
  r.ci_low = diffs[std::min(lo, n - 1)];
  r.ci_high = diffs[std::clamp<std::size_t>(hi_end, 1, n) - 1];
  return r;
}

BootstrapResult paired_bootstrap(std::span<const SegmentStats> a,
                                 std::span<const SegmentStats> b, Metric metric,
                                 const MetricOptions& metric_options,
                                 const BootstrapOptions& options) {
  check_pair(a, b);
  const auto indices = draw_indices(a.size(), options);
  return bootstrap_with_indices(a, b, metric, metric_options, indices, options);
}

SignificanceMatrix significance_matrix(std::span<const LabeledSystem> systems,
                                       Metric metric,
                                       const MetricOptions& metric_options,
                                       const BootstrapOptions& options) {
  SignificanceMatrix m;
  m.metric = metric;
  const std::size_t n = systems.size();
  m.cells.assign(n, std::vector<std::optional<BootstrapResult>>(n));
  for (const auto& s : systems) m.labels.push_back(s.label);
  if (n == 0) return m;
  for (const auto& s : systems) check_pair(systems[0].segments, s.segments);
  const auto indices = draw_indices(systems[0].segments.size(), options);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      BootstrapResult r = bootstrap_with_indices(systems[i].segments,
                                                 systems[j].segments, metric,
                                                 metric_options, indices, options);
      BootstrapResult mirrored = r;
      std::swap(mirrored.score_a, mirrored.score_b);
      mirrored.delta = -r.delta;
      mirrored.ci_low = -r.ci_high;
      mirrored.ci_high = -r.ci_low;
      m.cells[i][j] = r;
      m.cells[j][i] = mirrored;
    }
  }
  return m;
}

// ---- ranking ----

bool natural_less(std::string_view a, std::string_view b) {
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      std::string_view na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

RankTable rank_systems(const RankInput& input) {
  RankTable t;
  t.columns = input.columns;
  const std::size_t n = input.rows.size();
  const std::size_t c = input.columns.size();
  std::vector<std::vector<double>> scores(n, std::vector<double>(c));
  for (std::size_t r = 0; r < n; ++r) {
    if (std::find(t.labels.begin(), t.labels.end(), input.rows[r].label) !=
        t.labels.end()) {
      throw InvalidConfig("system '" + input.rows[r].label + "' listed twice");
    }
    t.labels.push_back(input.rows[r].label);
    for (std::size_t k = 0; k < c; ++k) {
      auto it = input.rows[r].scores.find(input.columns[k].name);
      if (it == input.rows[r].scores.end()) {
        throw MissingCell("system '" + input.rows[r].label + "' has no score for '" +
                          input.columns[k].name + "'");
      }
      scores[r][k] = it->second;
    }
  }

  t.ranks.assign(n, std::vector<int>(c));
  for (std::size_t k = 0; k < c; ++k) {
    const bool higher = higher_is_better(input.columns[k].metric);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (scores[x][k] != scores[y][k]) {
        return higher ? scores[x][k] > scores[y][k] : scores[x][k] < scores[y][k];
      }
      return natural_less(t.labels[x], t.labels[y]);
    });
    for (std::size_t pos = 0; pos < n; ++pos) {
      t.ranks[order[pos]][k] = static_cast<int>(pos + 1);
    }
  }

  t.mean_rank.assign(n, 0.0);
  t.mean_bleu.assign(n, 0.0);
  std::size_t bleu_columns = 0;
  for (std::size_t k = 0; k < c; ++k) {
    if (input.columns[k].metric == Metric::kBleu) ++bleu_columns;
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < c; ++k) {
      t.mean_rank[r] += t.ranks[r][k];
      if (input.columns[k].metric == Metric::kBleu) t.mean_bleu[r] += scores[r][k];
    }
    if (c) t.mean_rank[r] /= static_cast<double>(c);
    if (bleu_columns) t.mean_bleu[r] /= static_cast<double>(bleu_columns);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (t.mean_rank[x] != t.mean_rank[y]) return t.mean_rank[x] < t.mean_rank[y];
    if (t.mean_bleu[x] != t.mean_bleu[y]) return t.mean_bleu[x] > t.mean_bleu[y];
    return natural_less(t.labels[x], t.labels[y]);
  });
  for (std::size_t r : order) t.ordering.push_back(t.labels[r]);
  return t;
}

// ---- output ----

nlohmann::json to_json(const BootstrapResult& r) {
  return {
      {"metric", metric_name(r.metric)},
      {"score_a", r.score_a},
      {"score_b", r.score_b},
      {"delta", r.delta},
      {"p_value", r.p_value},
      {"significant", r.significant},
      {"alpha", kAlpha},
      {"degenerate", r.degenerate},
      {"ci_low", r.ci_low},
      {"ci_high", r.ci_high},
      {"iterations", r.iterations},
      {"sample_size", r.sample_size},
      {"seed", r.seed},
      {"rng", r.rng},
  };
}

nlohmann::json to_json(const SignificanceMatrix& m) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    for (std::size_t j = i + 1; j < m.labels.size(); ++j) {
      nlohmann::json cell = to_json(*m.cells[i][j]);
      cell["a"] = m.labels[i];
      cell["b"] = m.labels[j];
      cells.push_back(std::move(cell));
    }
  }
  return {{"metric", metric_name(m.metric)}, {"labels", m.labels}, {"pairs", cells}};
}

nlohmann::json to_json(const RankTable& t) {
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : t.columns) {
    columns.push_back({{"name", c.name}, {"metric", metric_name(c.metric)}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < t.labels.size(); ++r) {
    rows.push_back({{"label", t.labels[r]},
                    {"ranks", t.ranks[r]},
                    {"mean_rank", t.mean_rank[r]},
                    {"mean_bleu", t.mean_bleu[r]}});
  }
  return {{"aggregation", "mean per-column rank; ties by mean BLEU, then label"},
          {"columns", columns},
          {"rows", rows},
          {"ordering", t.ordering}};
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

}  // namespace

std::string render_bootstrap(const BootstrapResult& r, std::string_view label_a,
                             std::string_view label_b) {
  std::ostringstream ss;
  ss << metric_name(r.metric) << ": " << label_a << " " << fixed(r.score_a, 1)
     << " vs " << label_b << " " << fixed(r.score_b, 1) << "  delta "
     << fixed(r.delta, 2) << "  95% CI [" << fixed(r.ci_low, 2) << ", "
     << fixed(r.ci_high, 2) << "]  p = " << fixed(r.p_value, 4) << "  "
     << (r.significant ? "significant" : "not significant") << '\n';
  return ss.str();
}

std::string render_matrix(const SignificanceMatrix& m) {
  std::size_t width = 4;
  for (const auto& l : m.labels) width = std::max(width, l.size() + 1);
  std::ostringstream ss;
  ss << metric_name(m.metric) << " (* significant at p < 0.05, - not applicable)\n";
  ss << std::setw(static_cast<int>(width)) << "";
  for (const auto& l : m.labels) ss << std::setw(static_cast<int>(width)) << l;
  ss << '\n';
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    ss << std::left << std::setw(static_cast<int>(width)) << m.labels[i] << std::right;
    for (std::size_t j = 0; j < m.labels.size(); ++j) {
      const char* mark = !m.cells[i][j] ? "-" : m.cells[i][j]->significant ? "*" : "ns";
      ss << std::setw(static_cast<int>(width)) << mark;
    }
    ss << '\n';
  }
  return ss.str();
}

std::string render_rank_table(const RankTable& t) {
  std::size_t width = 6;
  for (const auto& l : t.labels) width = std::max(width, l.size() + 1);
  std::ostringstream ss;
  ss << std::left << std::setw(6) << "rank" << std::setw(static_cast<int>(width))
     << "system" << std::right << std::setw(10) << "mean_rank" << std::setw(11)
     << "mean_bleu" << '\n';
  for (std::size_t pos = 0; pos < t.ordering.size(); ++pos) {
    const auto r = static_cast<std::size_t>(
        std::find(t.labels.begin(), t.labels.end(), t.ordering[pos]) - t.labels.begin());
    ss << std::left << std::setw(6) << pos + 1 << std::setw(static_cast<int>(width))
       << t.labels[r] << std::right << std::setw(10) << fixed(t.mean_rank[r], 2)
       << std::setw(11) << fixed(t.mean_bleu[r], 2) << '\n';
  }
  return ss.str();
}

}  // namespace subvoc
