#include "safs/ranking.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "safs/common.hpp"

namespace safs {

ImportanceRanking ImportanceRanking::from_raw(std::span<const std::string> names, std::span<const double> raw,
                                              bool omit_zero) {
  if (names.size() != raw.size()) throw DataError("ranking: names and weights differ in length");
  double total = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0)) throw DataError("ranking: weights must be non-negative");
    total += w;
  }
  ImportanceRanking out;
  out.entries.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (omit_zero && raw[i] == 0.0) continue;
    out.entries.push_back({names[i], total > 0.0 ? 100.0 * raw[i] / total : 0.0});
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const RankedFeature& a, const RankedFeature& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.name < b.name;
  });
  return out;
}

std::vector<std::string> select_top_k(const ImportanceRanking& ranking, std::size_t k) {
  if (k == 0) throw DataError("select_top_k: k must be at least 1");
  std::vector<std::string> out;
  const std::size_t n = std::min(k, ranking.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranking.entries[i].name);
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

}  // namespace

void write_ranking_csv(const ImportanceRanking& ranking, std::ostream& out) {
  out << "rank,feature,weight\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    out << (i + 1) << ',' << csv_field(ranking.entries[i].name) << ',' << format_double(ranking.entries[i].weight)
        << '\n';
  }
}

ImportanceRanking read_ranking_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "rank,feature,weight") {
    throw DataError("ranking file: missing 'rank,feature,weight' header");
  }
  ImportanceRanking out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto first = line.find(',');
    const auto last = line.rfind(',');
    if (first == std::string::npos || first == last) {
      throw DataError("ranking file line " + std::to_string(lineno) + ": expected 3 fields");
    }
    const double rank = parse_double(std::string_view(line).substr(0, first));
    if (rank != static_cast<double>(out.size() + 1)) {
      throw DataError("ranking file line " + std::to_string(lineno) + ": ranks must be consecutive from 1");
    }
    std::string name = std::string(trim(std::string_view(line).substr(first + 1, last - first - 1)));
    if (name.size() >= 2 && name.front() == '"' && name.back() == '"') {
      std::string unq;
      for (std::size_t i = 1; i + 1 < name.size(); ++i) {
        unq.push_back(name[i]);
        if (name[i] == '"') ++i;
      }
      name = unq;
    }
    out.entries.push_back({name, parse_double(std::string_view(line).substr(last + 1))});
  }
  return out;
}

double mse(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size()) throw DataError("mse: length mismatch");
  if (pred.empty()) throw DataError("mse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mu = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(v.size());
}

}  // namespace safs
