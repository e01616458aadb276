#include "mec/metrics.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace mec {

DropRecord make_record(DropRecord base, double compute_j, double transmit_j) {
  base.compute_j = compute_j;
  base.transmit_j = transmit_j;
  base.total_j = compute_j + transmit_j;
  return base;
}

std::optional<double> sop(std::span<const DropRecord> records) {
  std::size_t served = 0;
  std::size_t offloaders = 0;
  for (const auto& r : records) {
    served += r.served;
    offloaders += r.offloaders;
  }
  if (offloaders == 0) return std::nullopt;
  return static_cast<double>(served) / static_cast<double>(offloaders);
}

namespace {

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace

const GroupStats* AggregateReport::find(const std::string& strategy, std::size_t servers,
                                        const std::string& profile) const {
  for (const auto& g : groups)
    if (g.strategy == strategy && g.servers == servers && g.profile == profile) return &g;
  return nullptr;
}

AggregateReport aggregate(std::span<const DropRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  using Key = std::tuple<std::string, std::size_t, std::string>;
  std::map<Key, std::vector<const DropRecord*>> groups;
  std::set<std::uint64_t> seeds;
  for (const auto& r : records) {
    groups[{r.strategy, r.servers, r.profile}].push_back(&r);
    seeds.insert(r.seed);
  }

  AggregateReport report;
  report.drop_count = seeds.size();
  for (const auto& [key, members] : groups) {
    GroupStats g;
    std::tie(g.strategy, g.servers, g.profile) = key;
    g.drops = members.size();
    std::vector<double> total, compute, transmit;
    std::vector<DropRecord> copies;
    double converged = 0.0;
    for (const DropRecord* r : members) {
      total.push_back(r->total_j);
      compute.push_back(r->compute_j);
      transmit.push_back(r->transmit_j);
      copies.push_back(*r);
      converged += r->converged_fraction;
    }
    g.compute_j = summarize(compute);
    g.transmit_j = summarize(transmit);
    g.total_j = summarize(total);
    g.total_j.mean = g.compute_j.mean + g.transmit_j.mean;
    g.sop = sop(copies);
    g.converged_fraction = converged / static_cast<double>(members.size());
    report.groups.push_back(std::move(g));
  }
  return report;
}

}  // namespace mec
