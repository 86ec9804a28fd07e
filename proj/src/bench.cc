#include "reifkb/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "reifkb/dataset.h"
#include "reifkb/errors.h"
#include "reifkb/hash.h"
#include "reifkb/kb_io.h"
#include "reifkb/kvmem.h"
#include "reifkb/reified.h"
#include "reifkb/synth.h"

namespace reifkb {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::uint64_t CellKey(std::uint64_t seed, int n, std::size_t relations) {
  Fnv1a h;
  h.U64(seed);
  h.U64(static_cast<std::uint64_t>(n));
  h.U64(relations);
  return h.digest();
}

struct Queries {
  Matrix x;               // b x N_E one-hot seeds
  std::vector<Matrix> r;  // one b x N_R matrix per hop
};

// Same stream for every strategy in a cell: the generator is keyed on the
// cell, not the strategy.
Queries MakeQueries(const BenchConfig& c, int n, std::size_t entities, std::size_t relations) {
  std::mt19937_64 rng(CellKey(c.seed, n, relations));
  Queries q;
  q.x = Matrix(c.batch, entities);
  for (std::size_t i = 0; i < c.batch; ++i) q.x(i, rng() % entities) = 1.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t h = 0; h < c.hops; ++h) {
    Matrix r(c.batch, relations);
    for (double& v : r.data()) v = 1.0 + c.epsilon * u(rng);
    q.r.push_back(std::move(r));
  }
  return q;
}

Matrix RowOf(const Matrix& m, std::size_t i) { return Matrix::RowVector(m.row(i)); }

// Naive mixing only takes single examples, so the minibatch is looped here.
Matrix NaiveBatch(const Matrix& x, const Matrix& r, const KnowledgeBase& kb, OpCounts* counts) {
  Matrix out(x.rows(), kb.FollowOutputDim());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Matrix y = FollowNaive(RowOf(x, i), RowOf(r, i), kb, counts);
    std::copy(y.data().begin(), y.data().end(), out.row(i).begin());
  }
  return out;
}

struct Cell {
  std::shared_ptr<const KnowledgeBase> kb;
  std::shared_ptr<const ReifiedKB> rkb;
  std::shared_ptr<const ShardedReifiedKB> skb;
};

Matrix RunHops(Strategy s, const Cell& cell, const Queries& q, bool parallel_shards,
               OpCounts* counts) {
  Matrix x = q.x;
  for (const Matrix& r : q.r) {
    switch (s) {
      case Strategy::kNaiveMixing: x = NaiveBatch(x, r, *cell.kb, counts); break;
      case Strategy::kLateMixing: x = FollowLate(x, r, *cell.kb, counts); break;
      case Strategy::kReified: x = FollowReified(x, r, *cell.rkb, counts); break;
      case Strategy::kSharded: x = FollowSharded(x, r, *cell.skb, parallel_shards, counts); break;
    }
  }
  return x;
}

}  // namespace

std::uint64_t EstimateBytes(Strategy strategy, std::size_t entities, std::size_t triples,
                            std::size_t relations, std::size_t batch, std::size_t shards) {
  const std::uint64_t f = sizeof(double), idx = sizeof(Index);
  const std::uint64_t b = batch, ne = entities, nt = triples, nr = relations;
  // Per-relation CSR storage of the KB: one index and one value per triple.
  const std::uint64_t kb_bytes = nt * (idx + f) + nr * (ne + 1) * idx;
  switch (strategy) {
    case Strategy::kNaiveMixing:
      // Mixed matrix plus the running sparse sum, one example at a time.
      return kb_bytes + 2 * nt * (2 * idx + f) + 2 * ne * f + nr * f;
    case Strategy::kLateMixing:
      // Input, accumulator and one per-relation product.
      return kb_bytes + 3 * b * ne * f + b * nr * f;
    case Strategy::kReified:
    case Strategy::kSharded: {
      const std::uint64_t m = std::max<std::uint64_t>(1, shards);
      const std::uint64_t per_shard = (nt + m - 1) / m;
      // Six indices and three values per triple, two b x N_T temporaries
      // per live shard, dense input, output and relation weights.
      const std::uint64_t live = strategy == Strategy::kSharded ? m : 1;
      return nt * (6 * idx + 3 * f) + live * 2 * b * per_shard * f + 2 * b * ne * f + b * nr * f;
    }
  }
  return 0;
}

std::vector<RunRecord> RunFollowBench(const BenchConfig& c, const BenchLog& log) {
  if (c.iterations < 3) throw ConfigError("bench: measured iterations must be >= 3");
  if (c.batch == 0 || c.hops == 0) throw ConfigError("bench: batch and hops must be >= 1");
  std::vector<RunRecord> out;
  for (int n : c.grid_sizes) {
    for (std::size_t nr : c.relation_counts) {
      std::vector<std::pair<Strategy, std::size_t>> runs;
      for (Strategy s : c.strategies) runs.push_back({s, 1});
      if (c.shards > 1) runs.push_back({Strategy::kSharded, c.shards});

      const std::size_t edges = GridEdgeCount(n);
      if (nr > edges) {
        for (auto [s, m] : runs) {
          RunRecord rec;
          rec.n = n;
          rec.num_entities = static_cast<std::size_t>(n) * n;
          rec.num_triples = edges;
          rec.num_relations = nr;
          rec.strategy = StrategyName(s);
          rec.shards = m;
          rec.batch = c.batch;
          rec.hops = c.hops;
          rec.iterations = c.iterations;
          rec.status = "skipped";
          rec.seed = c.seed;
          out.push_back(rec);
        }
        continue;
      }

      const auto t0 = Clock::now();
      Cell cell;
      cell.kb = std::make_shared<const KnowledgeBase>(GenGridKb({n, nr, false}));
      const double build_seconds = Seconds(t0, Clock::now());
      const auto t1 = Clock::now();
      cell.rkb = std::make_shared<const ReifiedKB>(Reify(*cell.kb));
      if (c.shards > 1) cell.skb = std::make_shared<const ShardedReifiedKB>(Shard(*cell.rkb, c.shards));
      const double reify_seconds = Seconds(t1, Clock::now());
      const Queries q = MakeQueries(c, n, cell.kb->num_entities(), nr);

      for (auto [s, m] : runs) {
        RunRecord rec;
        rec.n = n;
        rec.num_entities = cell.kb->num_entities();
        rec.num_triples = cell.kb->num_triples();
        rec.num_relations = nr;
        rec.strategy = StrategyName(s);
        rec.shards = m;
        rec.batch = c.batch;
        rec.hops = c.hops;
        rec.iterations = c.iterations;
        rec.seed = c.seed;
        rec.est_bytes = EstimateBytes(s, rec.num_entities, rec.num_triples, nr, c.batch, m);
        const bool reified = s == Strategy::kReified || s == Strategy::kSharded;
        rec.bytes_per_triple = reified ? static_cast<double>(cell.rkb->Storage().bytes) /
                                             static_cast<double>(std::max<std::size_t>(1, rec.num_triples))
                                       : 0.0;
        rec.setup_seconds = build_seconds + (reified ? reify_seconds : 0.0);
        if (rec.est_bytes > c.mem_budget_bytes) {
          rec.status = "over_budget";
          out.push_back(rec);
          if (log) log("n=" + std::to_string(n) + " N_R=" + std::to_string(nr) + " " + rec.strategy + ": over budget");
          continue;
        }
        rec.status = "ok";
        const bool parallel = s == Strategy::kSharded;
        RunHops(s, cell, q, parallel, &rec.ops);
        for (std::size_t w = 0; w < c.warmup; ++w) RunHops(s, cell, q, parallel, nullptr);
        std::vector<double> times;
        double total = 0.0;
        for (std::size_t it = 0; it < c.iterations; ++it) {
          const auto a = Clock::now();
          Matrix y = RunHops(s, cell, q, parallel, nullptr);
          const double dt = Seconds(a, Clock::now());
          if (y.rows() != c.batch) throw ConsistencyError("bench: wrong output batch");
          times.push_back(dt);
          total += dt;
        }
        rec.median_seconds = Median(times);
        rec.qps = rec.median_seconds > 0 ? static_cast<double>(c.batch) / rec.median_seconds : 0.0;
        rec.qps_mean = total > 0 ? static_cast<double>(c.batch * c.iterations) / total : 0.0;
        out.push_back(rec);
        if (log) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "n=%d N_R=%zu %s: %.1f qps", n, nr, rec.strategy.c_str(), rec.qps);
          log(buf);
        }
      }
    }
  }
  return out;
}

std::vector<KvRecord> RunKvBench(const BenchConfig& c, const BenchLog& log) {
  if (c.iterations < 3) throw ConfigError("bench: measured iterations must be >= 3");
  std::vector<KvRecord> out;
  for (int n : c.kv_grid_sizes) {
    auto kb = GenGridKb({n});
    KvMemory mem = KvMemory::Build(kb, c.kv_embed_dim, c.seed);
    std::mt19937_64 rng(CellKey(c.seed, n, 0));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix x(c.kv_batch, kb.num_entities()), q(c.kv_batch, c.kv_embed_dim);
    for (std::size_t i = 0; i < c.kv_batch; ++i) x(i, rng() % kb.num_entities()) = 1.0;
    for (double& v : q.data()) v = u(rng);
    mem.Forward(kb, x, q);
    std::vector<double> times;
    for (std::size_t it = 0; it < c.iterations; ++it) {
      const auto a = Clock::now();
      auto readout = mem.Forward(kb, x, q);
      times.push_back(Seconds(a, Clock::now()));
      if (readout.scores.rows() != c.kv_batch) throw ConsistencyError("bench: wrong KV output");
    }
    KvRecord rec;
    rec.n = n;
    rec.num_triples = kb.num_triples();
    rec.embed_dim = c.kv_embed_dim;
    rec.kv_bytes_per_triple = KvMemory::BytesPerTriple(c.kv_embed_dim);
    rec.reified_bytes_per_triple = 6 * sizeof(Index) + 3 * sizeof(double);
    rec.kv_bytes = mem.bytes();
    rec.reified_bytes = Reify(kb).Storage().bytes;
    rec.median_seconds = Median(times);
    rec.seconds_per_query = rec.median_seconds / static_cast<double>(c.kv_batch);
    out.push_back(rec);
    if (log) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "kv-mem N_T=%zu: %.3g s/query", rec.num_triples, rec.seconds_per_query);
      log(buf);
    }
  }
  return out;
}

KvFit FitKv(const std::vector<KvRecord>& records) {
  KvFit fit;
  if (records.size() < 2) return fit;
  auto ls = [](const std::vector<double>& x, const std::vector<double>& y, double* slope,
               double* intercept) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    *slope = den != 0 ? (n * sxy - sx * sy) / den : 0.0;
    *intercept = (sy - *slope * sx) / n;
  };
  std::vector<double> x, y, lx, ly;
  double lo = 1e300, hi = 0;
  for (const KvRecord& r : records) {
    const double nt = static_cast<double>(r.num_triples);
    x.push_back(nt);
    y.push_back(r.seconds_per_query);
    lx.push_back(std::log(nt));
    ly.push_back(std::log(std::max(r.seconds_per_query, 1e-300)));
    lo = std::min(lo, nt);
    hi = std::max(hi, nt);
  }
  ls(x, y, &fit.slope, &fit.intercept);
  double unused = 0;
  ls(lx, ly, &fit.loglog_slope, &unused);
  fit.decades = std::log10(hi / lo);
  return fit;
}

namespace {

const char* kRunHeader =
    "n,num_entities,num_triples,num_relations,strategy,shards,batch,hops,iterations,status,"
    "est_bytes,sp_dense_matmuls,dense_ops,sparse_adds,peak_dense_floats,bytes_per_triple,seed,"
    "median_seconds,qps,qps_mean,setup_seconds";

const char* kKvHeader =
    "n,num_triples,embed_dim,kv_bytes_per_triple,reified_ints_per_triple,"
    "reified_floats_per_triple,reified_bytes_per_triple,kv_bytes,reified_bytes,"
    "median_seconds,seconds_per_query";

std::vector<std::vector<std::string>> SplitCsv(const std::string& text, const char* header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ConfigError("CSV header mismatch: expected \"" + std::string(header) + "\"");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  const std::size_t want = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != want) throw ConfigError("CSV line " + std::to_string(line_no) + ": wrong column count");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double ToD(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw ConfigError("CSV: not a number: \"" + s + "\"");
  }
}

std::uint64_t ToU(const std::string& s) { return static_cast<std::uint64_t>(ToD(s)); }

std::string Num(double v) { return FormatDouble(v); }

}  // namespace

std::string RunRecordsCsv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << kRunHeader << '\n';
  for (const RunRecord& r : records) {
    out << r.n << ',' << r.num_entities << ',' << r.num_triples << ',' << r.num_relations << ','
        << r.strategy << ',' << r.shards << ',' << r.batch << ',' << r.hops << ',' << r.iterations
        << ',' << r.status << ',' << r.est_bytes << ',' << r.ops.sp_dense_matmuls << ','
        << r.ops.dense_add_or_hadamard << ',' << r.ops.sparse_adds << ','
        << r.ops.peak_dense_floats << ',' << Num(r.bytes_per_triple) << ',' << r.seed << ','
        << Num(r.median_seconds) << ',' << Num(r.qps) << ',' << Num(r.qps_mean) << ','
        << Num(r.setup_seconds) << '\n';
  }
  return out.str();
}

std::vector<RunRecord> ParseRunRecordsCsv(const std::string& text) {
  std::vector<RunRecord> out;
  for (const auto& c : SplitCsv(text, kRunHeader)) {
    RunRecord r;
    r.n = static_cast<int>(ToD(c[0]));
    r.num_entities = ToU(c[1]);
    r.num_triples = ToU(c[2]);
    r.num_relations = ToU(c[3]);
    r.strategy = c[4];
    r.shards = ToU(c[5]);
    r.batch = ToU(c[6]);
    r.hops = ToU(c[7]);
    r.iterations = ToU(c[8]);
    r.status = c[9];
    r.est_bytes = ToU(c[10]);
    r.ops.sp_dense_matmuls = ToU(c[11]);
    r.ops.dense_add_or_hadamard = ToU(c[12]);
    r.ops.sparse_adds = ToU(c[13]);
    r.ops.peak_dense_floats = ToU(c[14]);
    r.bytes_per_triple = ToD(c[15]);
    r.seed = ToU(c[16]);
    r.median_seconds = ToD(c[17]);
    r.qps = ToD(c[18]);
    r.qps_mean = ToD(c[19]);
    r.setup_seconds = ToD(c[20]);
    out.push_back(r);
  }
  return out;
}

std::string KvRecordsCsv(const std::vector<KvRecord>& records) {
  std::ostringstream out;
  out << kKvHeader << '\n';
  for (const KvRecord& r : records) {
    out << r.n << ',' << r.num_triples << ',' << r.embed_dim << ',' << r.kv_bytes_per_triple << ','
        << r.reified_ints_per_triple << ',' << r.reified_floats_per_triple << ','
        << r.reified_bytes_per_triple << ',' << r.kv_bytes << ',' << r.reified_bytes << ','
        << Num(r.median_seconds) << ',' << Num(r.seconds_per_query) << '\n';
  }
  return out.str();
}

std::vector<KvRecord> ParseKvRecordsCsv(const std::string& text) {
  std::vector<KvRecord> out;
  for (const auto& c : SplitCsv(text, kKvHeader)) {
    KvRecord r;
    r.n = static_cast<int>(ToD(c[0]));
    r.num_triples = ToU(c[1]);
    r.embed_dim = ToU(c[2]);
    r.kv_bytes_per_triple = ToU(c[3]);
    r.reified_ints_per_triple = ToU(c[4]);
    r.reified_floats_per_triple = ToU(c[5]);
    r.reified_bytes_per_triple = ToU(c[6]);
    r.kv_bytes = ToU(c[7]);
    r.reified_bytes = ToU(c[8]);
    r.median_seconds = ToD(c[9]);
    r.seconds_per_query = ToD(c[10]);
    out.push_back(r);
  }
  return out;
}

namespace {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // positive values only
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string Pow10Label(int e) {
  if (e >= 0 && e <= 4) {
    std::string s = "1";
    for (int i = 0; i < e; ++i) s += '0';
    return s;
  }
  return "1e" + std::to_string(e);
}

// Standalone log-log line plot with decade gridlines.
std::string LogLogSvg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
  const double W = 640, H = 440, L = 80, R = 150, T = 40, B = 60;
  double xmin = 1e300, xmax = 0, ymin = 1e300, ymax = 0;
  for (const Series& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax <= 0) xmin = 1, xmax = 10, ymin = 1, ymax = 10;
  const int x0 = static_cast<int>(std::floor(std::log10(xmin)));
  const int x1 = std::max(x0 + 1, static_cast<int>(std::ceil(std::log10(xmax))));
  const int y0 = static_cast<int>(std::floor(std::log10(ymin)));
  const int y1 = std::max(y0 + 1, static_cast<int>(std::ceil(std::log10(ymax))));
  auto px = [&](double x) { return L + (std::log10(x) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (std::log10(y) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << Fmt((W - R + L) / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << title << "</text>\n";
  for (int e = x0; e <= x1; ++e) {
    const double x = px(std::pow(10.0, e));
    o << "<line x1=\"" << Fmt(x) << "\" y1=\"" << T << "\" x2=\"" << Fmt(x) << "\" y2=\"" << H - B
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << Fmt(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
      << Pow10Label(e) << "</text>\n";
  }
  for (int e = y0; e <= y1; ++e) {
    const double y = py(std::pow(10.0, e));
    o << "<line x1=\"" << L << "\" y1=\"" << Fmt(y) << "\" x2=\"" << W - R << "\" y2=\"" << Fmt(y)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << Fmt(y + 4) << "\" text-anchor=\"end\">"
      << Pow10Label(e) << "</text>\n";
  }
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
    << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << Fmt((W - R + L) / 2) << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
    << xlabel << "</text>\n";
  o << "<text transform=\"translate(20," << Fmt((H - B + T) / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = kColors[i % (sizeof kColors / sizeof kColors[0])];
    if (!s.points.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (auto [x, y] : s.points) o << Fmt(px(x)) << ',' << Fmt(py(y)) << ' ';
      o << "\"/>\n";
      for (auto [x, y] : s.points)
        o << "<circle cx=\"" << Fmt(px(x)) << "\" cy=\"" << Fmt(py(y)) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
    const double ly = T + 16 + 18 * static_cast<double>(i);
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << Fmt(ly - 4) << "\" x2=\"" << W - R + 30
      << "\" y2=\"" << Fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 36 << "\" y=\"" << Fmt(ly) << "\">" << s.name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string SeriesName(const RunRecord& r) {
  return r.strategy == "sharded" ? "sharded x" + std::to_string(r.shards) : r.strategy;
}

}  // namespace

std::vector<std::filesystem::path> WriteBenchPlots(const std::vector<RunRecord>& records,
                                                   const std::vector<KvRecord>& kv,
                                                   const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  std::map<std::size_t, std::map<std::string, Series>> by_rel;
  std::map<int, std::map<std::string, Series>> by_grid;
  for (const RunRecord& r : records) {
    if (r.status == "skipped") continue;
    const std::string name = SeriesName(r);
    Series& a = by_rel[r.num_relations][name];
    Series& b = by_grid[r.n][name];
    a.name = b.name = name;
    // Over-budget cells report qps 0, which has no place on a log axis.
    if (r.qps <= 0) continue;
    a.points.push_back({static_cast<double>(r.num_entities), r.qps});
    b.points.push_back({static_cast<double>(r.num_relations), r.qps});
  }
  auto flatten = [](std::map<std::string, Series>& m) {
    std::vector<Series> out;
    for (auto& [name, s] : m) {
      std::sort(s.points.begin(), s.points.end());
      out.push_back(s);
    }
    return out;
  };
  for (auto& [nr, m] : by_rel) {
    auto path = dir / ("qps_vs_entities_r" + std::to_string(nr) + ".svg");
    WriteTextFile(path, LogLogSvg("2-hop follow, " + std::to_string(nr) + " relations",
                                  "entities", "queries / sec", flatten(m)));
    written.push_back(path);
  }
  for (auto& [n, m] : by_grid) {
    auto path = dir / ("qps_vs_relations_n" + std::to_string(n) + ".svg");
    WriteTextFile(path, LogLogSvg("2-hop follow, " + std::to_string(n) + "x" + std::to_string(n) + " grid",
                                  "relations", "queries / sec", flatten(m)));
    written.push_back(path);
  }
  if (!kv.empty()) {
    Series s;
    s.name = "kv-mem";
    for (const KvRecord& r : kv)
      if (r.seconds_per_query > 0) s.points.push_back({static_cast<double>(r.num_triples), r.seconds_per_query});
    std::sort(s.points.begin(), s.points.end());
    auto path = dir / "kvmem_time_vs_triples.svg";
    WriteTextFile(path, LogLogSvg("key-value memory read", "triples", "seconds / query", {s}));
    written.push_back(path);
  }
  return written;
}

}  // namespace reifkb
