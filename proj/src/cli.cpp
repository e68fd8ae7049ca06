#include "quadsieve/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "quadsieve/arith.hpp"
#include "quadsieve/contfrac.hpp"
#include "quadsieve/errors.hpp"
#include "quadsieve/quadfield.hpp"
#include "quadsieve/sieve.hpp"
#include "quadsieve/stage_config.hpp"
#include "quadsieve/zeta.hpp"

namespace quadsieve::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return ss.str();
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command_line"] = command_line;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  RunManifest manifest;
  std::string emit_dir;

  // Writes `text` to emit_dir/name when emitting, otherwise to stdout.
  void emit(const std::string& name, const std::string& text, bool echo_header = false) {
    if (emit_dir.empty()) {
      if (echo_header) out << "# " << name << '\n';
      out << text;
      return;
    }
    std::ofstream f(fs::path(emit_dir) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (fs::path(emit_dir) / name).string());
    f << text;
    manifest.outputs.push_back(name);
  }

  void finish() {
    if (emit_dir.empty()) return;
    std::ofstream f(fs::path(emit_dir) / "manifest.json", std::ios::binary);
    if (!f) throw ConfigError("cannot write manifest in " + emit_dir);
    f << manifest.to_json();
  }
};

std::vector<std::int64_t> parse_ints(const std::string& text, std::size_t count, const std::string& what) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoll(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + item + "' is not an integer");
    }
  }
  if (count != 0 && out.size() != count) {
    throw ConfigError(what + " expects " + std::to_string(count) + " comma-separated integers, got '" + text + "'");
  }
  return out;
}

struct Family {
  std::uint64_t b, s;
  unsigned k;
};

Family parse_family(const std::string& text) {
  const auto v = parse_ints(text, 3, "--family");
  if (v[0] < 0 || v[1] < 1 || v[2] < 1) throw ConfigError("--family needs b >= 0, s >= 1, k >= 1");
  return {static_cast<std::uint64_t>(v[0]), static_cast<std::uint64_t>(v[1]), static_cast<unsigned>(v[2])};
}

std::string format_real(const zeta::Real& v) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(6) << v;
  return ss.str();
}

std::vector<charmod::CharacterSpec> load_stages(Context& ctx, const std::string& path) {
  const auto resolved = config::resolve_config_path(path);
  const std::string text = config::read_file(resolved);
  ctx.manifest.config_hash = sha256_hex(text);
  return config::parse_stages(text);
}

// ---- sieve -------------------------------------------------------------------

int cmd_sieve(Context& ctx, const std::string& stages_path, std::int64_t initial, unsigned jobs) {
  const auto specs = load_stages(ctx, stages_path);
  const auto stages = sieve::make_stages(specs);
  for (const auto& st : stages) {
    if (!sieve::condition_star(st)) {
      ctx.err << "stage " << st.chi.label() << ": condition (*) fails\n";
      return kVerificationFailed;
    }
  }
  const auto verdict = sieve::theorem2_verdict(stages, initial, jobs);
  for (std::size_t i = 0; i < verdict.result.stages.size(); ++i) {
    const auto& st = verdict.result.stages[i];
    ctx.emit("stage" + std::to_string(i + 1) + "_" + st.label + ".tsv", sieve::format_table(st.rows), true);
  }
  ctx.emit("survivors.tsv", sieve::format_survivors(verdict.result.survivors, verdict.result.moduli), true);
  if (ctx.emit_dir.empty()) {
    ctx.out << "# summary\n" << verdict.report;
  } else {
    ctx.emit("summary.txt", verdict.report);
    ctx.out << verdict.report;
  }
  return verdict.holds ? kOk : kVerificationFailed;
}

// ---- cf ----------------------------------------------------------------------

int cmd_cf(Context& ctx, const std::string& sqrt_arg, const std::string& surd_arg, const std::string& family_arg,
           bool half) {
  using namespace contfrac;
  const int given = !sqrt_arg.empty() + !surd_arg.empty() + !family_arg.empty();
  if (given != 1) throw ConfigError("cf needs exactly one of --sqrt, --surd, --family");
  if (half && family_arg.empty()) throw ConfigError("--half applies to --family only");
  if (!sqrt_arg.empty()) {
    const mpz_class d(sqrt_arg);
    ctx.emit("cf.txt", expand(QuadraticSurd::sqrt(d)).to_string() + "\n");
    return kOk;
  }
  if (!surd_arg.empty()) {
    const auto v = parse_ints(surd_arg, 3, "--surd");
    ctx.emit("cf.txt", expand(QuadraticSurd(v[0], v[1], v[2])).to_string() + "\n");
    return kOk;
  }
  const auto f = parse_family(family_arg);
  const mpz_class D = family_discriminant(f.b, f.s, f.k);
  const CFExpansion closed = half ? family_half_expansion(f.b, f.s, f.k) : mcz_expansion(f.b, f.s, f.k);
  const CFExpansion direct = expand(half ? QuadraticSurd(1, 2, D) : QuadraticSurd::sqrt(D));
  ctx.emit("cf.txt", closed.to_string() + "\n");
  if (!(canonical(closed) == direct)) {
    ctx.err << "closed form disagrees with direct expansion " << direct.to_string() << '\n';
    return kVerificationFailed;
  }
  return kOk;
}

// ---- classno -----------------------------------------------------------------

int cmd_classno(Context& ctx, std::int64_t d, std::int64_t scan_max, bool odd_only, const std::string& family_arg,
                bool prop, unsigned jobs) {
  const int given = (d != 0) + (scan_max != 0) + !family_arg.empty() + prop;
  if (given != 1) throw ConfigError("classno needs exactly one of --d, --scan-n2plus1, --family, --prop-checks");
  auto field_line = [](const quadfield::FieldData& fd) {
    std::ostringstream ss;
    ss << "D\td\th_narrow\th\tunit_norm\n"
       << fd.D.get_str() << '\t' << fd.d << '\t' << fd.h_narrow << '\t' << fd.h << '\t' << fd.unit_norm << '\n';
    return ss.str();
  };
  if (d != 0) {
    if (!quadfield::is_fundamental(d)) throw DomainError(std::to_string(d) + " is not a fundamental discriminant");
    ctx.emit("classno.tsv", field_line(quadfield::field_data(d % 4 == 0 ? d / 4 : d)));
    return kOk;
  }
  if (scan_max != 0) {
    const auto rows = quadfield::family_scan_n2plus1(scan_max, odd_only, jobs);
    ctx.emit("scan_n2plus1.tsv", quadfield::format_scan(rows));
    return kOk;
  }
  if (!family_arg.empty()) {
    const auto f = parse_family(family_arg);
    ctx.emit("classno.tsv", field_line(quadfield::family_field(f.b, f.s, f.k)));
    return kOk;
  }
  const auto report = quadfield::prop_checks(jobs);
  ctx.emit("prop_checks.tsv", report.to_string());
  return report.ok() ? kOk : kVerificationFailed;
}

// ---- verify ------------------------------------------------------------------

zeta::CharacterExact select_character(Context& ctx, const std::string& stages_path, const std::string& label,
                                      std::int64_t conductor, const std::vector<std::string>& components) {
  if (!components.empty()) {
    if (conductor == 0) throw ConfigError("--component needs --conductor");
    std::vector<zeta::ExactComponent> comps;
    for (const auto& c : components) {
      const auto v = parse_ints(c, 4, "--component");
      comps.push_back({v[0], v[1], v[2], v[3]});
    }
    return zeta::CharacterExact("custom", conductor, std::move(comps));
  }
  for (const auto& spec : load_stages(ctx, stages_path)) {
    if (spec.label == label) return zeta::CharacterExact::from_mod_i(charmod::CharacterModI(spec));
  }
  throw ConfigError("no stage labelled '" + label + "' in " + stages_path);
}

int cmd_verify(Context& ctx, const std::string& lemma, const std::string& params, std::int64_t terms,
               unsigned precision, const zeta::CharacterExact& chi) {
  zeta::Residual res;
  std::string extra;
  if (lemma == "3.1") {
    const auto v = parse_ints(params, 1, "--params (n)");
    res = zeta::lemma31_residual(v[0], chi, precision);
    extra = zeta::lemma31_integrality(v[0], chi).integral() ? "integral" : "not_integral";
  } else if (lemma == "4.2") {
    const auto v = parse_ints(params, 2, "--params (s,d)");
    res = zeta::lemma42_residual(v[0], v[1], chi, terms, precision);
  } else if (lemma == "4.3") {
    const auto v = parse_ints(params, 1, "--params (s)");
    res = zeta::lemma43_residual(v[0], chi, precision);
  } else if (lemma == "4.4") {
    const auto v = parse_ints(params, 3, "--params (b,s,k)");
    if (v[0] < 1 || v[1] < 1 || v[2] < 1) throw ConfigError("--params b,s,k must be positive");
    res = zeta::lemma44_residual(static_cast<std::uint64_t>(v[0]), static_cast<std::uint64_t>(v[1]),
                                 static_cast<unsigned>(v[2]), chi, terms, precision);
  } else {
    throw ConfigError("unknown lemma '" + lemma + "' (expected 3.1, 4.2, 4.3 or 4.4)");
  }
  const bool pass = res.within() && (extra.empty() || extra == "integral");
  std::ostringstream ss;
  ss << "lemma\tcharacter\tresidual\tbound\tresult\n"
     << lemma << '\t' << chi.label() << '\t' << format_real(res.value) << '\t' << format_real(res.bound) << '\t'
     << (pass ? "PASS" : "FAIL");
  if (!extra.empty()) ss << '\t' << extra;
  ss << '\n';
  ctx.emit("verify.tsv", ss.str());
  return pass ? kOk : kVerificationFailed;
}

// ---- scan --------------------------------------------------------------------

struct ScanLine {
  std::uint64_t b, s;
  unsigned k;
  std::string check;
  bool ok;
  std::string detail;
};

int cmd_scan(Context& ctx, std::uint64_t b_max, std::uint64_t s_max, unsigned k_max) {
  std::vector<ScanLine> lines;
  for (std::uint64_t b = 1; b <= b_max; ++b) {
    for (std::uint64_t s = 1; s <= s_max; ++s) {
      for (unsigned k = 1; k <= k_max; ++k) {
        const mpz_class D = contfrac::family_discriminant(b, s, k);
        const auto closed = contfrac::mcz_expansion(b, s, k);
        const auto direct = contfrac::expand(contfrac::QuadraticSurd::sqrt(D));
        lines.push_back({b, s, k, "mcz_expansion", closed == direct, closed.to_string()});
        if ((b + s) % 2 == 0) {
          const auto half = contfrac::family_half_expansion(b, s, k);
          const auto dh = contfrac::expand(contfrac::QuadraticSurd(1, 2, D));
          lines.push_back({b, s, k, "half_expansion", contfrac::canonical(half) == dh, half.to_string()});
        }
        for (auto p : arith::prime_divisors(b)) {
          if (p == 2) continue;
          const auto rep = contfrac::family_congruences(b, s, k, p);
          lines.push_back({b, s, k, "congruences_mod_" + std::to_string(p), rep.ok, rep.detail});
          bool absent = true;
          for (const auto& [j, v] : contfrac::norm_values_over_period(D)) absent = absent && v != p;
          lines.push_back({b, s, k, "norm_absent_" + std::to_string(p), absent, ""});
        }
      }
    }
  }
  std::ostringstream ss;
  ss << "b\ts\tk\tcheck\tresult\tdetail\n";
  bool all = true;
  for (const auto& l : lines) {
    ss << l.b << '\t' << l.s << '\t' << l.k << '\t' << l.check << '\t' << (l.ok ? "pass" : "FAIL") << '\t' << l.detail
       << '\n';
    all = all && l.ok;
  }
  ctx.emit("scan.tsv", ss.str());
  return all ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Class-number sieve and verification toolkit", "quadsieve"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string emit_dir;
  unsigned jobs = 1;

  auto* sieve_cmd = app.add_subcommand("sieve", "run the residue-class elimination pipeline");
  std::string stages_path = "appendix_a.cfg";
  std::int64_t initial = 175;
  sieve_cmd->add_option("--stages", stages_path, "stage config file")->capture_default_str();
  sieve_cmd->add_option("--initial-modulus", initial, "modulus of the starting classes U_m")->capture_default_str();
  sieve_cmd->add_option("--emit", emit_dir, "write TSVs and manifest.json into this directory");
  sieve_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* cf_cmd = app.add_subcommand("cf", "continued fraction expansions");
  std::string sqrt_arg, surd_arg, family_arg;
  bool half = false;
  cf_cmd->add_option("--sqrt", sqrt_arg, "expand sqrt(D)");
  cf_cmd->add_option("--surd", surd_arg, "expand (P + sqrt(D))/Q given as P,Q,D");
  cf_cmd->add_option("--family", family_arg, "closed-form expansion of sqrt(D(b,s,k)) given as b,s,k");
  cf_cmd->add_flag("--half", half, "use (1 + sqrt(D))/2 for the family");
  cf_cmd->add_option("--emit", emit_dir, "output directory");

  auto* cn_cmd = app.add_subcommand("classno", "class numbers of real quadratic fields");
  std::int64_t disc = 0, scan_max = 0;
  bool odd_only = false, prop = false;
  std::string cn_family;
  cn_cmd->add_option("--d", disc, "fundamental discriminant");
  cn_cmd->add_option("--scan-n2plus1", scan_max, "scan Q(sqrt(n^2+1)) for n up to N");
  cn_cmd->add_flag("--odd-only", odd_only, "restrict the scan to odd n");
  cn_cmd->add_option("--family", cn_family, "class number of Q(sqrt(D(b,s,k)))");
  cn_cmd->add_flag("--prop-checks", prop, "h > 1 spot checks on the family");
  cn_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  cn_cmd->add_option("--emit", emit_dir, "output directory");

  auto* verify_cmd = app.add_subcommand("verify", "check a zeta identity numerically");
  std::string lemma, params, char_label = "chi1";
  std::int64_t terms = 100000, conductor = 0;
  unsigned precision = zeta::kDefaultPrecisionBits;
  std::vector<std::string> components;
  verify_cmd->add_option("--lemma", lemma, "3.1, 4.2, 4.3 or 4.4")->required();
  verify_cmd->add_option("--params", params, "n | s,d | s | b,s,k")->required();
  verify_cmd->add_option("--terms", terms, "terms of the L(2) series")->capture_default_str();
  verify_cmd->add_option("--precision", precision, "MPFR precision in bits")->capture_default_str()->check(CLI::Range(64U, 1U << 16));
  verify_cmd->add_option("--stages", stages_path, "stage config holding the character")->capture_default_str();
  verify_cmd->add_option("--char", char_label, "stage label of the character")->capture_default_str();
  verify_cmd->add_option("--conductor", conductor, "conductor of a custom character");
  verify_cmd->add_option("--component", components, "custom component modulus,generator,exponent,order");
  verify_cmd->add_option("--emit", emit_dir, "output directory");

  auto* kr_cmd = app.add_subcommand("kronecker", "Kronecker symbol (a/n)");
  std::string kr_a, kr_n;
  kr_cmd->add_option("a", kr_a, "numerator")->required();
  kr_cmd->add_option("n", kr_n, "denominator")->required();

  auto* scan_cmd = app.add_subcommand("scan", "family grid checks: closed-form CFs, congruences, norm values");
  std::uint64_t b_max = 4, s_max = 4;
  unsigned k_max = 3;
  scan_cmd->add_option("--b-max", b_max)->capture_default_str();
  scan_cmd->add_option("--s-max", s_max)->capture_default_str();
  scan_cmd->add_option("--k-max", k_max)->capture_default_str()->check(CLI::Range(1U, 8U));
  scan_cmd->add_option("--emit", emit_dir, "output directory");

  std::vector<std::string> argv_store{"quadsieve"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  Context ctx{out, err, {}, emit_dir};
  {
    std::ostringstream cmd;
    for (std::size_t i = 0; i < args.size(); ++i) cmd << (i ? " " : "") << args[i];
    ctx.manifest.command_line = cmd.str();
  }
  try {
    if (!emit_dir.empty()) fs::create_directories(emit_dir);
    int code = kOk;
    if (*sieve_cmd) {
      code = cmd_sieve(ctx, stages_path, initial, jobs);
    } else if (*cf_cmd) {
      code = cmd_cf(ctx, sqrt_arg, surd_arg, family_arg, half);
    } else if (*cn_cmd) {
      code = cmd_classno(ctx, disc, scan_max, odd_only, cn_family, prop, jobs);
    } else if (*verify_cmd) {
      const auto chi = select_character(ctx, stages_path, char_label, conductor, components);
      code = cmd_verify(ctx, lemma, params, terms, precision, chi);
    } else if (*kr_cmd) {
      out << arith::kronecker(mpz_class(kr_a), mpz_class(kr_n)) << '\n';
    } else if (*scan_cmd) {
      code = cmd_scan(ctx, b_max, s_max, k_max);
    }
    ctx.finish();
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    err << "invalid character (" << e.check() << "): " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
  } catch (const UnsupportedSizeError& e) {
    err << "unsupported size: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid number: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "verification failed: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const fs::filesystem_error& e) {
    err << "filesystem error: " << e.what() << '\n';
  }
  return kUsageError;
}

}  // namespace quadsieve::cli
