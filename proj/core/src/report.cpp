#include "mlkfhe/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mlkfhe/text.hpp"

namespace mlkfhe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::string_view kNA = "NA";

std::string num(double v) { return std::isnan(v) ? std::string(kNA) : format_double(v); }

void write_header(std::ostream& out, const ReportMetadata& meta) {
  for (const auto& line : meta.lines()) out << "# " << line << '\n';
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
  return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

}  // namespace

std::string tool_version() {
#ifdef MLKFHE_VERSION_STRING
  return MLKFHE_VERSION_STRING;
#else
  return "unknown";
#endif
}

std::vector<std::string> ReportMetadata::lines() const {
  return {"mlkfhe " + version, "seed " + std::to_string(seed), "invocation " + invocation};
}

ExperimentSummary summarize(const ExperimentResult& result, std::size_t control) {
  ExperimentSummary s;
  s.datasets = result.datasets;
  s.algorithms = result.algorithms;
  const auto nd = static_cast<Eigen::Index>(s.datasets.size());
  const auto na = static_cast<Eigen::Index>(s.algorithms.size());
  if (control >= s.algorithms.size()) throw std::invalid_argument("control index out of range");
  s.control = control;

  // Successful cells keyed by (dataset, algorithm) -> (repetition, fold) -> cell.
  std::vector<std::vector<std::map<std::pair<std::size_t, std::size_t>, const CellResult*>>> cells(
      s.datasets.size(), std::vector<std::map<std::pair<std::size_t, std::size_t>, const CellResult*>>(
                             s.algorithms.size()));
  for (const auto& c : result.cells) {
    if (!c.ok) continue;
    cells[index_of(s.datasets, c.dataset)][index_of(s.algorithms, c.algorithm)][{c.repetition, c.fold}] =
        &c;
  }

  s.mean_macro_f = Matrix::Constant(nd, na, kNaN);
  s.sd_macro_f = Matrix::Constant(nd, na, kNaN);
  s.mean_hamming = Matrix::Constant(nd, na, kNaN);
  for (Eigen::Index d = 0; d < nd; ++d) {
    for (Eigen::Index a = 0; a < na; ++a) {
      const auto& group = cells[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)];
      if (group.empty()) continue;
      double sum = 0.0, hsum = 0.0;
      for (const auto& [key, c] : group) {
        sum += c->macro_f;
        hsum += c->hamming_loss;
      }
      const double m = static_cast<double>(group.size());
      const double mean = sum / m;
      double ss = 0.0;
      for (const auto& [key, c] : group) ss += (c->macro_f - mean) * (c->macro_f - mean);
      s.mean_macro_f(d, a) = mean;
      s.sd_macro_f(d, a) = group.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
      s.mean_hamming(d, a) = hsum / m;
    }
  }

  // Rank within each dataset; algorithms without results share the last rank.
  s.ranks = Matrix::Constant(nd, na, kNaN);
  std::vector<Eigen::Index> complete;
  for (Eigen::Index d = 0; d < nd; ++d) {
    std::vector<double> scores(static_cast<std::size_t>(na));
    bool full = true;
    for (Eigen::Index a = 0; a < na; ++a) {
      const double v = s.mean_macro_f(d, a);
      full = full && !std::isnan(v);
      scores[static_cast<std::size_t>(a)] = std::isnan(v) ? -1.0 : v;
    }
    const auto r = midranks(scores, false);
    for (Eigen::Index a = 0; a < na; ++a) s.ranks(d, a) = r[static_cast<std::size_t>(a)];
    if (full) complete.push_back(d);
  }
  s.average_ranks.assign(s.algorithms.size(), kNaN);
  if (nd > 0) {
    for (Eigen::Index a = 0; a < na; ++a) s.average_ranks[static_cast<std::size_t>(a)] = s.ranks.col(a).mean();
  }

  if (complete.size() >= 2 && na >= 2) {
    Matrix table(static_cast<Eigen::Index>(complete.size()), na);
    for (std::size_t i = 0; i < complete.size(); ++i) {
      table.row(static_cast<Eigen::Index>(i)) = s.mean_macro_f.row(complete[i]);
    }
    s.friedman = friedman_finner(table, control);
    s.pairwise = friedman_pairwise(table);
  }

  for (std::size_t d = 0; d < s.datasets.size(); ++d) {
    for (std::size_t a = 0; a < s.algorithms.size(); ++a) {
      for (std::size_t b = a + 1; b < s.algorithms.size(); ++b) {
        WilcoxonCell w;
        w.dataset = s.datasets[d];
        w.a = a;
        w.b = b;
        std::vector<double> x, y;
        for (const auto& [key, c] : cells[d][a]) {
          const auto other = cells[d][b].find(key);
          if (other == cells[d][b].end()) continue;
          x.push_back(c->macro_f);
          y.push_back(other->second->macro_f);
        }
        w.pairs = x.size();
        if (!x.empty()) w.test = wilcoxon_signed_rank(x, y);
        s.wilcoxon.push_back(std::move(w));
      }
    }
  }
  return s;
}

void write_results_csv(std::ostream& out, const ExperimentResult& result,
                       const ReportMetadata& meta, bool timing) {
  write_header(out, meta);
  out << "dataset,algorithm,repetition,fold,macro_f,hamming_loss,train_seconds\n";
  for (const auto& c : result.cells) {
    out << join_csv({c.dataset, c.algorithm, std::to_string(c.repetition), std::to_string(c.fold),
                     c.ok ? format_double(c.macro_f) : std::string(kNA),
                     c.ok ? format_double(c.hamming_loss) : std::string(kNA),
                     c.ok && timing ? format_double(c.train_seconds) : std::string(kNA)})
        << '\n';
  }
}

ExperimentResult read_results_csv(std::istream& in, const std::string& source) {
  static const std::vector<std::string> kColumns{"dataset", "algorithm", "repetition", "fold",
                                                 "macro_f", "hamming_loss", "train_seconds"};
  ExperimentResult result;
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  const auto fail = [&](const std::string& message) {
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + message);
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split_csv_record(text);
    if (!fields) fail("unterminated quoted field");
    if (!header) {
      if (*fields != kColumns) fail("unexpected header");
      header = true;
      continue;
    }
    if (fields->size() != kColumns.size()) fail("expected 7 fields");
    CellResult c;
    c.dataset = (*fields)[0];
    c.algorithm = (*fields)[1];
    const auto rep = parse_integer((*fields)[2]);
    const auto fold = parse_integer((*fields)[3]);
    if (!rep || !fold || *rep < 0 || *fold < 0) fail("bad repetition or fold");
    c.repetition = static_cast<std::size_t>(*rep);
    c.fold = static_cast<std::size_t>(*fold);
    const auto f = parse_double((*fields)[4]);
    const auto h = parse_double((*fields)[5]);
    c.ok = f && h;
    if (c.ok) {
      c.macro_f = *f;
      c.hamming_loss = *h;
      c.train_seconds = parse_double((*fields)[6]).value_or(0.0);
    } else if ((*fields)[4] != kNA || (*fields)[5] != kNA) {
      fail("bad metric value");
    }
    if (index_of(result.datasets, c.dataset) == result.datasets.size()) {
      result.datasets.push_back(c.dataset);
    }
    if (index_of(result.algorithms, c.algorithm) == result.algorithms.size()) {
      result.algorithms.push_back(c.algorithm);
    }
    result.cells.push_back(std::move(c));
  }
  if (!header) fail("missing header row");
  return result;
}

void write_ranks_csv(std::ostream& out, const ExperimentSummary& s, const ReportMetadata& meta) {
  write_header(out, meta);
  out << "dataset,algorithm,mean_macro_f,sd_macro_f,mean_hamming_loss,rank\n";
  for (std::size_t d = 0; d < s.datasets.size(); ++d) {
    for (std::size_t a = 0; a < s.algorithms.size(); ++a) {
      const auto i = static_cast<Eigen::Index>(d);
      const auto j = static_cast<Eigen::Index>(a);
      out << join_csv({s.datasets[d], s.algorithms[a], num(s.mean_macro_f(i, j)),
                       num(s.sd_macro_f(i, j)), num(s.mean_hamming(i, j)), num(s.ranks(i, j))})
          << '\n';
    }
  }
  for (std::size_t a = 0; a < s.algorithms.size(); ++a) {
    out << join_csv({"Avg. rank", s.algorithms[a], std::string(kNA), std::string(kNA),
                     std::string(kNA), num(s.average_ranks[a])})
        << '\n';
  }
}

void write_stats_csv(std::ostream& out, const ExperimentSummary& s, const ReportMetadata& meta) {
  write_header(out, meta);
  out << "test,dataset,algorithm_a,algorithm_b,statistic,p_value,adjusted_p\n";
  for (const auto& w : s.wilcoxon) {
    out << join_csv({"wilcoxon", w.dataset, s.algorithms[w.a], s.algorithms[w.b],
                     w.test ? num(w.test->statistic) : std::string(kNA),
                     w.test ? num(w.test->p_value) : std::string(kNA), std::string(kNA)})
        << '\n';
  }
  if (!s.friedman) return;
  const FriedmanResult& f = *s.friedman;
  out << join_csv({"friedman", "all", std::string(kNA), std::string(kNA), num(f.chi_square),
                   num(f.p_value), std::string(kNA)})
      << '\n';
  for (std::size_t a = 0; a < s.algorithms.size(); ++a) {
    if (a == f.control) continue;
    out << join_csv({"finner-vs-control", "all", s.algorithms[f.control], s.algorithms[a],
                     num(f.z[a]), num(f.raw_p[a]), num(f.adjusted_p[a])})
        << '\n';
  }
  for (const auto& p : s.pairwise) {
    out << join_csv({"finner-pairwise", "all", s.algorithms[p.a], s.algorithms[p.b], num(p.z),
                     num(p.p_value), num(p.adjusted_p)})
        << '\n';
  }
}

void write_cd_plot_csv(std::ostream& out, const ExperimentSummary& s, const ReportMetadata& meta,
                       double alpha) {
  write_header(out, meta);
  out << "kind,algorithm_a,algorithm_b,avg_rank_a,avg_rank_b,adjusted_p,significant\n";
  for (std::size_t a = 0; a < s.algorithms.size(); ++a) {
    out << join_csv({"rank", s.algorithms[a], std::string(kNA), num(s.average_ranks[a]),
                     std::string(kNA), std::string(kNA), std::string(kNA)})
        << '\n';
  }
  for (const auto& p : s.pairwise) {
    out << join_csv({"pair", s.algorithms[p.a], s.algorithms[p.b], num(s.average_ranks[p.a]),
                     num(s.average_ranks[p.b]), num(p.adjusted_p),
                     p.adjusted_p < alpha ? "1" : "0"})
        << '\n';
  }
}

std::string summary_table(const ExperimentSummary& s) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Dataset"};
  header.insert(header.end(), s.algorithms.begin(), s.algorithms.end());
  rows.push_back(header);
  for (std::size_t d = 0; d < s.datasets.size(); ++d) {
    std::vector<std::string> row{s.datasets[d]};
    for (std::size_t a = 0; a < s.algorithms.size(); ++a) {
      const auto i = static_cast<Eigen::Index>(d);
      const auto j = static_cast<Eigen::Index>(a);
      if (std::isnan(s.mean_macro_f(i, j))) {
        row.emplace_back("NA");
        continue;
      }
      row.push_back(format_fixed(s.mean_macro_f(i, j), 4) + " ± " +
                    format_fixed(s.sd_macro_f(i, j), 4) + " (" + format_double(s.ranks(i, j)) +
                    ")");
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::string> avg{"Avg. rank"};
  for (double r : s.average_ranks) avg.push_back(format_fixed(r, 2));
  rows.push_back(std::move(avg));

  // Column widths in code points; "±" is two bytes in UTF-8.
  const auto width = [](const std::string& text) {
    std::size_t w = 0;
    for (unsigned char c : text) w += (c & 0xc0) != 0x80;
    return w;
  };
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << row[c];
      if (c + 1 < row.size()) out << std::string(widths[c] - width(row[c]), ' ');
    }
    out << '\n';
  }
  return out.str();
}

ReportFiles write_report(const std::filesystem::path& dir, const ExperimentResult& result,
                         std::size_t control, const ReportMetadata& meta, bool timing) {
  std::filesystem::create_directories(dir);
  const ExperimentSummary summary = summarize(result, control);
  ReportFiles files{dir / "results.csv", dir / "ranks.csv", dir / "stats.csv",
                    dir / "cd_plot.csv", dir / "summary.txt"};
  const auto open = [](const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
  };
  {
    auto out = open(files.results);
    write_results_csv(out, result, meta, timing);
  }
  {
    auto out = open(files.ranks);
    write_ranks_csv(out, summary, meta);
  }
  {
    auto out = open(files.stats);
    write_stats_csv(out, summary, meta);
  }
  {
    auto out = open(files.cd_plot);
    write_cd_plot_csv(out, summary, meta);
  }
  {
    auto out = open(files.summary);
    write_header(out, meta);
    out << summary_table(summary);
  }
  return files;
}

}  // namespace mlkfhe
