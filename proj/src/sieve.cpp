#include "quadsieve/sieve.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "quadsieve/errors.hpp"
#include "quadsieve/parallel.hpp"

namespace quadsieve::sieve {

using arith::mod;

std::optional<std::int64_t> ResidueConstraint::residue_mod(std::int64_t modulus) const {
  for (const auto& c : constraints) {
    if (c.modulus % modulus == 0) return c.value % modulus;
  }
  return std::nullopt;
}

std::optional<std::int64_t> ResidueConstraint::stored(std::int64_t modulus) const {
  for (const auto& c : constraints) {
    if (c.modulus == modulus) return c.value;
  }
  return std::nullopt;
}

bool u_membership(std::int64_t a, std::int64_t m) {
  if (m <= 1 || m % 2 == 0) throw DomainError("u_membership: m must be odd and > 1");
  for (auto p : arith::prime_divisors(static_cast<std::uint64_t>(m))) {
    const auto pp = static_cast<std::int64_t>(p);
    const std::int64_t x = mod(a, pp);
    if (arith::kronecker(x * x + 1, pp) != -1) return false;
  }
  return true;
}

std::vector<std::int64_t> u_representatives(std::int64_t m) {
  std::vector<std::int64_t> out;
  for (std::int64_t a = 0; a < m; ++a) {
    if (u_membership(a, m)) out.push_back(a);
  }
  return out;
}

bool condition_star(const SieveStage& stage) {
  if (charmod::m_char(stage.chi).value != 0) return false;
  for (auto a : u_representatives(stage.q())) {
    if (charmod::b_sum(stage.chi, 2 * a).value == 0) return false;
  }
  return true;
}

TableRow compute_row(const SieveStage& stage, std::int64_t n0) {
  const std::int64_t q = stage.q();
  const std::int64_t r = stage.r();
  TableRow row;
  row.n0 = n0;
  row.a_val = charmod::a_sum(stage.chi, 2 * n0).value;
  row.b_val = charmod::b_sum(stage.chi, 2 * n0).value;
  if (row.b_val == 0) {
    throw PipelineError("condition (*) violated: B(2*" + std::to_string(n0) + ") = 0 mod " + std::to_string(r) +
                        " for " + stage.chi.label());
  }
  const std::int64_t ratio = arith::mul_mod(row.a_val, arith::inv_mod(2 * row.b_val, r), r);
  row.n_mod_r = mod(n0 - arith::mul_mod(q, ratio, r), r);
  row.symbol = arith::kronecker(row.n_mod_r * row.n_mod_r + 1, r);
  return row;
}

StageOutput run_stage(const SieveStage& stage, std::span<const std::int64_t> n0s, unsigned jobs) {
  for (auto n0 : n0s) {
    if (n0 < 0 || n0 >= stage.q() || !u_membership(n0, stage.q())) {
      throw PreconditionError("run_stage(" + stage.chi.label() + "): " + std::to_string(n0) + " is not in U_" +
                              std::to_string(stage.q()));
    }
  }
  StageOutput out;
  out.rows = parallel_map(n0s.size(), jobs, [&](std::size_t i) { return compute_row(stage, n0s[i]); });
  // symbol 0 means r | n^2+1 and is eliminated along with +1
  for (const auto& row : out.rows) {
    if (row.symbol == -1) out.survivors.push_back(row);
  }
  return out;
}

PipelineResult run_pipeline(std::span<const SieveStage> stages, std::int64_t initial_modulus, unsigned jobs) {
  PipelineResult result;
  result.moduli.push_back(initial_modulus);
  for (auto a : u_representatives(initial_modulus)) {
    result.survivors.push_back(ResidueConstraint{{arith::Residue::make(a, initial_modulus)}});
  }

  for (const auto& stage : stages) {
    const std::int64_t q = stage.q();
    const std::int64_t r = stage.r();
    for (auto m : result.moduli) {
      if (m != r && std::gcd(m, r) != 1) {
        throw PipelineError(stage.chi.label() + ": r = " + std::to_string(r) + " is not coprime to constrained modulus " +
                            std::to_string(m));
      }
    }
    if (!condition_star(stage)) throw PipelineError(stage.chi.label() + ": condition (*) does not hold");

    std::vector<std::int64_t> n0s;
    n0s.reserve(result.survivors.size());
    for (const auto& rc : result.survivors) {
      auto n0 = rc.residue_mod(q);
      if (!n0) {
        throw PipelineError(stage.chi.label() + ": survivors carry no class modulo " + std::to_string(q));
      }
      n0s.push_back(*n0);
    }

    // identical n0 values share one row computation
    std::map<std::int64_t, TableRow> cache;
    {
      std::vector<std::int64_t> distinct;
      for (auto n0 : n0s) {
        if (cache.emplace(n0, TableRow{}).second) distinct.push_back(n0);
      }
      const auto computed = run_stage(stage, distinct, jobs);
      for (const auto& row : computed.rows) cache[row.n0] = row;
    }

    StageReport report;
    report.label = stage.chi.label();
    report.q = q;
    report.r = r;
    report.input = result.survivors.size();
    std::vector<ResidueConstraint> next;
    for (std::size_t i = 0; i < n0s.size(); ++i) {
      const TableRow& row = cache.at(n0s[i]);
      report.rows.push_back(row);
      if (row.symbol != -1) {
        ++report.eliminated_by_symbol;
        continue;
      }
      ResidueConstraint rc = result.survivors[i];
      if (auto existing = rc.stored(r)) {
        if (*existing != row.n_mod_r) {
          ++report.eliminated_by_compatibility;
          continue;
        }
      } else {
        rc.constraints.push_back(arith::Residue::make(row.n_mod_r, r));
      }
      next.push_back(std::move(rc));
    }
    if (std::find(result.moduli.begin(), result.moduli.end(), r) == result.moduli.end()) result.moduli.push_back(r);
    report.survivors = next;
    result.survivors = std::move(next);
    result.stages.push_back(std::move(report));
  }
  return result;
}

Verdict theorem2_verdict(std::span<const SieveStage> stages, std::int64_t initial_modulus, unsigned jobs) {
  Verdict verdict;
  verdict.result = run_pipeline(stages, initial_modulus, jobs);
  std::ostringstream ss;
  ss << "initial classes: " << u_representatives(initial_modulus).size() << " (U_" << initial_modulus << ")\n";
  for (const auto& st : verdict.result.stages) {
    ss << st.label << " (q=" << st.q << ", r=" << st.r << "): " << st.input << " in, " << st.eliminated_by_symbol
       << " eliminated by symbol, " << st.eliminated_by_compatibility << " by compatibility, "
       << st.survivors.size() << " left\n";
  }
  verdict.holds = verdict.result.survivors.empty();
  ss << (verdict.holds ? "no class survives" : std::to_string(verdict.result.survivors.size()) + " classes survive")
     << "\n";
  verdict.report = ss.str();
  return verdict;
}

std::string format_table(std::span<const TableRow> rows) {
  std::ostringstream ss;
  ss << "n0\tA\tB\tn_mod_r\tkronecker\n";
  for (const auto& r : rows) {
    ss << r.n0 << '\t' << r.a_val << '\t' << r.b_val << '\t' << r.n_mod_r << '\t' << r.symbol << '\n';
  }
  return ss.str();
}

std::string format_survivors(std::span<const ResidueConstraint> survivors, std::span<const std::int64_t> moduli) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < moduli.size(); ++i) ss << (i ? "\t" : "") << "n_mod_" << moduli[i];
  ss << '\n';
  for (const auto& rc : survivors) {
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      auto v = rc.stored(moduli[i]);
      ss << (i ? "\t" : "") << (v ? std::to_string(*v) : std::string("-"));
    }
    ss << '\n';
  }
  return ss.str();
}

std::vector<SieveStage> make_stages(std::span<const charmod::CharacterSpec> specs) {
  std::vector<SieveStage> stages;
  stages.reserve(specs.size());
  for (const auto& s : specs) stages.push_back(SieveStage{charmod::CharacterModI(s)});
  return stages;
}

}  // namespace quadsieve::sieve
