#pragma once

// Residue-class elimination: each stage forces n into one class modulo r
// through n = n0 - q A(2n0) / (2 B(2n0)) (mod r) and discards the classes
// where n^2 + 1 is a square (or zero) modulo r.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadsieve/arith.hpp"
#include "quadsieve/charmod.hpp"

namespace quadsieve::sieve {

struct SieveStage {
  charmod::CharacterModI chi;

  std::int64_t q() const { return chi.conductor(); }
  std::int64_t r() const { return chi.target_prime(); }
};

struct TableRow {
  std::int64_t n0 = 0;
  std::int64_t a_val = 0;
  std::int64_t b_val = 0;
  std::int64_t n_mod_r = 0;
  int symbol = 0;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

/// Conjunction of congruences on n, kept unmerged so that a later stage can
/// compare (not combine) a re-derived class.
struct ResidueConstraint {
  std::vector<arith::Residue> constraints;

  /// n mod `modulus`, derived from any constraint whose modulus it divides.
  std::optional<std::int64_t> residue_mod(std::int64_t modulus) const;
  /// The constraint stored with exactly this modulus.
  std::optional<std::int64_t> stored(std::int64_t modulus) const;

  friend bool operator==(const ResidueConstraint&, const ResidueConstraint&) = default;
};

/// a in U_m: (a^2+1 / p) = -1 for every prime p | m.
bool u_membership(std::int64_t a, std::int64_t m);

/// Representatives of U_m in [0, m), ascending.
std::vector<std::int64_t> u_representatives(std::int64_t m);

/// m_chi = 0 mod r and B(2a) != 0 mod r for every a in U_q.
bool condition_star(const SieveStage& stage);

TableRow compute_row(const SieveStage& stage, std::int64_t n0);

struct StageOutput {
  std::vector<TableRow> rows;       // every computed row, in input order
  std::vector<TableRow> survivors;  // rows with symbol -1
};

/// Throws PreconditionError if some n0 is outside U_q, PipelineError if
/// B(2 n0) vanishes mod r.
StageOutput run_stage(const SieveStage& stage, std::span<const std::int64_t> n0s, unsigned jobs = 1);

struct StageReport {
  std::string label;
  std::int64_t q = 0;
  std::int64_t r = 0;
  std::vector<TableRow> rows;
  std::size_t input = 0;
  std::size_t eliminated_by_symbol = 0;
  std::size_t eliminated_by_compatibility = 0;
  std::vector<ResidueConstraint> survivors;
};

struct PipelineResult {
  std::vector<StageReport> stages;
  std::vector<ResidueConstraint> survivors;
  std::vector<std::int64_t> moduli;  // column order of the survivor table
};

PipelineResult run_pipeline(std::span<const SieveStage> stages, std::int64_t initial_modulus, unsigned jobs = 1);

struct Verdict {
  bool holds = false;
  std::string report;
  PipelineResult result;
};

/// Runs the pipeline from U_initial; holds iff nothing survives.
Verdict theorem2_verdict(std::span<const SieveStage> stages, std::int64_t initial_modulus = 175, unsigned jobs = 1);

/// `n0\tA\tB\tn_mod_r\tkronecker` TSV.
std::string format_table(std::span<const TableRow> rows);

/// One column per constrained modulus, in order of first appearance.
std::string format_survivors(std::span<const ResidueConstraint> survivors, std::span<const std::int64_t> moduli);

std::vector<SieveStage> make_stages(std::span<const charmod::CharacterSpec> specs);

}  // namespace quadsieve::sieve
