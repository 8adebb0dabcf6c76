#include "tcs/sim_engine.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "tcs/random_stream.hpp"

namespace tcs {
namespace {

constexpr std::uint64_t kBlockSize = 256;
constexpr double kNotDrawn = std::numeric_limits<double>::quiet_NaN();

struct ShockSlot {
  std::uint32_t array;  // 0 for umbrella shocks
  std::uint32_t family;
  std::uint32_t subset;
  tweedie::Sampler sampler;
};

struct Term {
  bool umbrella;
  std::size_t slot;
  double coefficient;
};

struct CellPlan {
  CellId cell;
  std::uint64_t offset;  // grid offset, used as the stream index
  std::vector<Term> terms;
  tweedie::Sampler idiosyncratic;
};

// Everything needed to run a replication, resolved once up front.
struct Plan {
  std::vector<ShockSlot> umbrella;
  std::vector<ShockSlot> array_specific;
  std::vector<std::vector<CellPlan>> cells;  // [array][k]
  std::size_t key_count = 0;
};

tweedie::Params component_params(double p, const MeanCov& mc) {
  return tweedie::from_mean_cov(p, mc);
}

Plan make_plan(const ShockModel& model) {
  Plan plan;
  const double p = model.p();
  if (p == 1.0)
    for (std::size_t n = 0; n < model.array_count(); ++n)
      for (const CellId& c : model.array(n).layout.cells())
        observation_distribution(model, n, c);
  const auto keys = contribution_keys(model);
  plan.key_count = keys.size();

  // slot_of[r][s] for umbrella, slot_of_n[n][r][s] for array-specific.
  std::vector<std::vector<long>> umbrella_slot(model.family_count());
  std::vector<std::vector<std::vector<long>>> array_slot(
      model.array_count(), std::vector<std::vector<long>>(model.family_count()));

  for (std::size_t r = 0; r < model.family_count(); ++r) {
    const ShockFamily& f = model.family(r);
    const auto& subsets = f.partition.subsets();
    umbrella_slot[r].assign(subsets.size(), -1);
    for (std::size_t n = 0; n < model.array_count(); ++n)
      array_slot[n][r].assign(subsets.size(), -1);

    for (std::size_t s = 0; s < subsets.size(); ++s) {
      bool any = false;
      for (std::size_t n = 0; n < model.array_count(); ++n) {
        bool here = false;
        for (const CellId& c : subsets[s])
          if (model.contains(n, c)) {
            here = true;
            break;
          }
        any = any || here;
        if (here && f.has_array_specific()) {
          array_slot[n][r][s] = static_cast<long>(plan.array_specific.size());
          plan.array_specific.push_back(
              {static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(r),
               static_cast<std::uint32_t>(s),
               tweedie::Sampler(component_params(p, (*f.array_specific)[n][s]))});
        }
      }
      if (any && f.has_umbrella()) {
        umbrella_slot[r][s] = static_cast<long>(plan.umbrella.size());
        plan.umbrella.push_back({0, static_cast<std::uint32_t>(r),
                                 static_cast<std::uint32_t>(s),
                                 tweedie::Sampler(component_params(p, (*f.umbrella)[s]))});
      }
    }
  }

  plan.cells.resize(model.array_count());
  for (std::size_t n = 0; n < model.array_count(); ++n) {
    const ClaimArray& a = model.array(n);
    for (const CellId& c : a.layout.cells()) {
      std::vector<Term> terms;
      for (const ContributionKey& key : keys) {
        if (key.role == ShockRole::idiosyncratic) continue;
        const ShockFamily& f = model.family(key.family);
        const std::size_t s = f.partition.subset_of(c);
        if (key.role == ShockRole::umbrella)
          terms.push_back({true, static_cast<std::size_t>(umbrella_slot[key.family][s]),
                           mixture_coefficient(model, n, c, key.family, key.role)});
        else
          terms.push_back({false, static_cast<std::size_t>(array_slot[n][key.family][s]),
                           mixture_coefficient(model, n, c, key.family, key.role)});
      }
      plan.cells[n].push_back(
          {c, static_cast<std::uint64_t>(a.idiosyncratic.offset(c)),
           std::move(terms),
           tweedie::Sampler(component_params(p, a.idiosyncratic[c]))});
    }
  }
  return plan;
}

ReplicationSample empty_sample(const ShockModel& model) {
  ReplicationSample out;
  for (const ShockFamily& f : model.families())
    out.umbrella.emplace_back(f.has_umbrella() ? f.partition.size() : 0, kNotDrawn);
  out.array_specific.resize(model.array_count());
  for (std::size_t n = 0; n < model.array_count(); ++n) {
    for (const ShockFamily& f : model.families())
      out.array_specific[n].emplace_back(f.has_array_specific() ? f.partition.size() : 0,
                                         kNotDrawn);
    out.idiosyncratic.emplace_back(model.grid().rows(), model.grid().cols(), kNotDrawn);
    out.total.emplace_back(model.grid().rows(), model.grid().cols(), kNotDrawn);
  }
  return out;
}

std::vector<std::vector<CellAccumulator>> empty_accumulators(const ShockModel& model,
                                                             std::size_t key_count) {
  std::vector<std::vector<CellAccumulator>> out(model.array_count());
  for (std::size_t n = 0; n < model.array_count(); ++n)
    for (const CellId& c : model.array(n).layout.cells())
      out[n].push_back({c, {}, std::vector<double>(key_count, 0.0), 0, 0});
  return out;
}

void run_replication(const Plan& plan, std::uint64_t seed, std::uint64_t rep,
                     std::vector<double>& umbrella, std::vector<double>& array_specific,
                     std::vector<std::vector<CellAccumulator>>& acc,
                     ReplicationSample* keep) {
  for (std::size_t k = 0; k < plan.umbrella.size(); ++k) {
    const ShockSlot& slot = plan.umbrella[k];
    RandomStream rng = make_stream(
        seed, {StreamRole::umbrella, 0, slot.family, slot.subset, rep});
    umbrella[k] = slot.sampler(rng);
    if (keep) keep->umbrella[slot.family][slot.subset] = umbrella[k];
  }
  for (std::size_t k = 0; k < plan.array_specific.size(); ++k) {
    const ShockSlot& slot = plan.array_specific[k];
    RandomStream rng = make_stream(
        seed, {StreamRole::array_specific, slot.array, slot.family, slot.subset, rep});
    array_specific[k] = slot.sampler(rng);
    if (keep) keep->array_specific[slot.array][slot.family][slot.subset] = array_specific[k];
  }

  std::vector<double> parts;
  for (std::size_t n = 0; n < plan.cells.size(); ++n) {
    for (std::size_t k = 0; k < plan.cells[n].size(); ++k) {
      const CellPlan& cp = plan.cells[n][k];
      RandomStream rng = make_stream(
          seed, {StreamRole::idiosyncratic, static_cast<std::uint32_t>(n), 0, cp.offset, rep});
      const double z = cp.idiosyncratic(rng);

      parts.clear();
      double x = 0.0;
      for (const Term& t : cp.terms) {
        const double part =
            t.coefficient * (t.umbrella ? umbrella[t.slot] : array_specific[t.slot]);
        parts.push_back(part);
        x += part;
      }
      parts.push_back(z);
      x += z;

      CellAccumulator& a = acc[n][k];
      a.total.push(x);
      if (x == 0.0) {
        ++a.undefined;
      } else {
        ++a.defined;
        for (std::size_t q = 0; q < parts.size(); ++q) a.fraction_sum[q] += parts[q] / x;
      }
      if (keep) {
        keep->idiosyncratic[n][cp.cell] = z;
        keep->total[n][cp.cell] = x;
      }
    }
  }
}

void merge_into(std::vector<std::vector<CellAccumulator>>& into,
                const std::vector<std::vector<CellAccumulator>>& from) {
  for (std::size_t n = 0; n < into.size(); ++n)
    for (std::size_t k = 0; k < into[n].size(); ++k) {
      CellAccumulator& a = into[n][k];
      const CellAccumulator& b = from[n][k];
      a.total.merge(b.total);
      for (std::size_t q = 0; q < a.fraction_sum.size(); ++q)
        a.fraction_sum[q] += b.fraction_sum[q];
      a.defined += b.defined;
      a.undefined += b.undefined;
    }
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!same_bits(a[k], b[k])) return false;
  return true;
}

bool same_bits(const Grid<double>& a, const Grid<double>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int i = 1; i <= a.rows(); ++i)
    for (int j = 1; j <= a.cols(); ++j)
      if (!same_bits(a[{i, j}], b[{i, j}])) return false;
  return true;
}

}  // namespace

SimulationResult simulate(const ShockModel& model, const SimulationOptions& options) {
  const Plan plan = make_plan(model);

  SimulationResult result;
  result.seed = options.seed;
  result.replications = options.replications;
  result.keys = contribution_keys(model);
  result.cells = empty_accumulators(model, plan.key_count);
  if (options.retain) result.retained.assign(options.replications, empty_sample(model));

  const std::uint64_t blocks = (options.replications + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<std::vector<CellAccumulator>>> block_acc(blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    std::vector<double> umbrella(plan.umbrella.size());
    std::vector<double> array_specific(plan.array_specific.size());
    try {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        auto acc = empty_accumulators(model, plan.key_count);
        const std::uint64_t end = std::min(options.replications, (b + 1) * kBlockSize);
        for (std::uint64_t rep = b * kBlockSize; rep < end; ++rep)
          run_replication(plan, options.seed, rep, umbrella, array_specific, acc,
                          options.retain ? &result.retained[rep] : nullptr);
        block_acc[b] = std::move(acc);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& acc : block_acc) merge_into(result.cells, acc);
  return result;
}

bool identical(const SimulationResult& a, const SimulationResult& b) {
  if (a.seed != b.seed || a.replications != b.replications || a.keys != b.keys ||
      a.cells.size() != b.cells.size() || a.retained.size() != b.retained.size())
    return false;
  for (std::size_t n = 0; n < a.cells.size(); ++n) {
    if (a.cells[n].size() != b.cells[n].size()) return false;
    for (std::size_t k = 0; k < a.cells[n].size(); ++k) {
      const CellAccumulator& x = a.cells[n][k];
      const CellAccumulator& y = b.cells[n][k];
      if (x.cell != y.cell || x.defined != y.defined || x.undefined != y.undefined ||
          !same_bits(x.fraction_sum, y.fraction_sum) || !(x.total == y.total))
        return false;
    }
  }
  for (std::size_t rep = 0; rep < a.retained.size(); ++rep) {
    const ReplicationSample& x = a.retained[rep];
    const ReplicationSample& y = b.retained[rep];
    if (x.umbrella.size() != y.umbrella.size() ||
        x.array_specific.size() != y.array_specific.size())
      return false;
    for (std::size_t r = 0; r < x.umbrella.size(); ++r)
      if (!same_bits(x.umbrella[r], y.umbrella[r])) return false;
    for (std::size_t n = 0; n < x.array_specific.size(); ++n) {
      if (x.array_specific[n].size() != y.array_specific[n].size()) return false;
      for (std::size_t r = 0; r < x.array_specific[n].size(); ++r)
        if (!same_bits(x.array_specific[n][r], y.array_specific[n][r])) return false;
      if (!same_bits(x.idiosyncratic[n], y.idiosyncratic[n]) ||
          !same_bits(x.total[n], y.total[n]))
        return false;
    }
  }
  return true;
}

std::vector<ContributionTable> realized_contributions(const SimulationResult& result,
                                                      const ShockModel& model,
                                                      std::size_t replication) {
  if (replication >= result.replications)
    throw std::out_of_range("replication index " + std::to_string(replication) +
                            " out of range");
  if (replication >= result.retained.size())
    throw InvalidState("replication draws were not retained; rerun with retain = true");
  const ReplicationSample& sample = result.retained[replication];

  std::vector<ContributionTable> tables;
  for (std::size_t n = 0; n < model.array_count(); ++n) {
    for (const ContributionKey& key : result.keys) {
      ContributionTable table{n, key, Grid<std::optional<double>>(
                                          model.grid().rows(), model.grid().cols())};
      for (const CellId& c : model.array(n).layout.cells()) {
        const double x = sample.total[n][c];
        if (x == 0.0) continue;
        double part = 0.0;
        switch (key.role) {
          case ShockRole::umbrella:
            part = mixture_coefficient(model, n, c, key.family, key.role) *
                   sample.umbrella[key.family][model.family(key.family).partition.subset_of(c)];
            break;
          case ShockRole::array_specific:
            part = mixture_coefficient(model, n, c, key.family, key.role) *
                   sample.array_specific[n][key.family]
                                        [model.family(key.family).partition.subset_of(c)];
            break;
          case ShockRole::idiosyncratic:
            part = sample.idiosyncratic[n][c];
            break;
        }
        table.values[c] = part / x;
      }
      tables.push_back(std::move(table));
    }
  }
  return tables;
}

std::vector<std::vector<CellEmpirical>> empirical_summary(const SimulationResult& result,
                                                          const ShockModel& model) {
  if (result.replications < 2)
    throw InvalidState("empirical summary needs at least two replications");
  std::vector<std::vector<CellEmpirical>> out(model.array_count());
  for (std::size_t n = 0; n < result.cells.size(); ++n) {
    for (const CellAccumulator& a : result.cells[n]) {
      CellEmpirical e;
      e.cell = a.cell;
      e.mean = a.total.mean();
      e.variance = a.total.variance();
      e.mean_se = a.total.mean_standard_error();
      e.variance_se = a.total.variance_standard_error();
      e.excluded = a.undefined;
      for (double s : a.fraction_sum)
        e.mean_fractions.push_back(a.defined ? s / static_cast<double>(a.defined)
                                             : std::numeric_limits<double>::quiet_NaN());
      out[n].push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace tcs
