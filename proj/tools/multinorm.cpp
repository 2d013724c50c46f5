// Command-line front end: decide multinorm equations over products of abelian
// fields, compute their obstruction groups and knot representatives, and
// export/validate splitting profiles.
//
// Exit codes (stable API):
//   0  success (decide: solvable)
//   2  domain or input error (message names the error code)
//   3  decide: obstructed (everywhere locally solvable, no global solution)
//   4  decide: no local solution

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multinorm/brauer.hpp"
#include "multinorm/cyclic_products.hpp"
#include "multinorm/json_io.hpp"
#include "multinorm/oracle.hpp"

namespace {

using namespace multinorm;

struct CommonOpts {
  std::vector<std::string> factor_specs;
  size_t pivot = 0;
  bool json_out = false;
  int64_t modulus_limit = Limits{}.modulus_limit;
  int64_t ambient_limit = Limits{}.ambient_limit;

  Limits limits() const {
    Limits lim;
    lim.modulus_limit = modulus_limit;
    lim.ambient_limit = ambient_limit;
    return lim;
  }

  std::vector<AbelianFieldQ> fields() const {
    if (factor_specs.empty())
      fail(ErrorCode::ZeroInput, "at least one --factor is required");
    std::vector<AbelianFieldQ> L;
    for (const auto& spec : factor_specs)
      L.push_back(parse_field_spec(spec, limits()));
    if (pivot >= L.size())
      fail(ErrorCode::ZeroInput, "--pivot index out of range");
    return L;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--factor", opts.factor_specs,
                  "factor field spec: quad:D | cyclosub:N:d | explicit:N:g1,g2,...");
  cmd->add_option("--pivot", opts.pivot, "index of the designated cyclic factor");
  cmd->add_flag("--json", opts.json_out, "emit a JSON report on stdout");
  cmd->add_option("--modulus-limit", opts.modulus_limit, "largest allowed conductor");
  cmd->add_option("--ambient-limit", opts.ambient_limit,
                  "largest allowed composite modulus");
}

Rational parse_rational(const std::string& text) {
  std::string num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  try {
    Rational c{BigInt(num), BigInt(den)};
    return c;
  } catch (const std::exception&) {
    fail(ErrorCode::ZeroInput, "cannot parse rational: " + text);
  }
}

std::string format_group(const std::vector<int64_t>& factors) {
  if (factors.empty()) return "0";
  std::string out;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) out += " x ";
    out += "Z/" + std::to_string(factors[i]);
  }
  return out;
}

std::string format_obstruction(const Obstruction& ob) {
  std::ostringstream os;
  bool first = true;
  for (const auto& part : ob.parts) {
    for (const auto& v : part.generator_values) {
      if (!first) os << ", ";
      first = false;
      os << "p=" << part.p << ": " << v.num() << "/" << v.den();
    }
  }
  if (first) os << "trivial group";
  return os.str();
}

int cmd_sha(const CommonOpts& opts) {
  auto L = opts.fields();
  ShaGroup sha = compute_sha(L, opts.pivot, opts.limits());

  bool all_cyclic = true;
  for (const auto& K : L)
    if (!K.is_quotient_cyclic()) all_cyclic = false;
  std::optional<CyclicProductReport> closed;
  if (all_cyclic) closed = sha_product_cyclic(L, opts.limits());

  if (opts.json_out) {
    json j = sha_to_json(sha);
    j["factors"] = json::array();
    for (const auto& K : L) j["factors"].push_back(field_to_json(K));
    j["pivot"] = opts.pivot;
    if (closed) j["prime_cases"] = cyclic_report_to_json(*closed)["prime_cases"];
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "Sha = " << format_group(sha.invariant_factors())
              << " (order " << sha.order().str() << ")\n";
    if (closed) {
      for (const auto& pc : closed->prime_cases) {
        std::cout << "  p=" << pc.p << ": "
                  << (pc.nonzero ? "nonzero, rank " + std::to_string(pc.rank)
                                 : "zero");
        if (pc.nonzero && pc.overfield) {
          std::cout << "; overfield conductor " << pc.overfield->conductor()
                    << "; local degrees";
          for (const auto& [v, d] : pc.local_degrees)
            std::cout << " " << v.str() << ":" << d;
        }
        std::cout << "\n";
      }
    }
  }
  return 0;
}

int cmd_decide(const CommonOpts& opts, const std::string& c_text) {
  auto L = opts.fields();
  Rational c = parse_rational(c_text);
  DecisionReport report = decide(L, opts.pivot, c, opts.limits());

  if (opts.json_out) {
    json j = verdict_to_json(report);
    j["c"] = c.str();
    std::cout << j.dump(2) << "\n";
  } else {
    switch (report.verdict) {
      case Verdict::Solvable:
        std::cout << "solvable: " << c.str() << " is a multinorm\n";
        break;
      case Verdict::Obstructed:
        std::cout << "obstructed: everywhere locally solvable, no global solution\n"
                  << "  alpha(" << c.str() << ") = "
                  << format_obstruction(*report.obstruction) << "\n";
        break;
      case Verdict::NoLocalSolution:
        std::cout << "no local solution at " << report.witness->str() << "\n";
        break;
    }
  }
  switch (report.verdict) {
    case Verdict::Solvable: return 0;
    case Verdict::Obstructed: return 3;
    case Verdict::NoLocalSolution: return 4;
  }
  return 0;
}

int cmd_knot(const CommonOpts& opts, int64_t bound) {
  auto L = opts.fields();
  KnotReport report = knot_group(L, opts.pivot, bound, opts.limits());

  if (opts.json_out) {
    std::cout << knot_to_json(report).dump(2) << "\n";
  } else {
    std::cout << "knot group order " << report.group_order.str() << "; "
              << report.reps.size() << " representative(s); scanned "
              << report.scanned << " value(s)\n";
    for (const auto& rep : report.reps)
      std::cout << "  c = " << rep.c.str() << ": "
                << format_obstruction(rep.character) << "\n";
    if (!report.complete)
      std::cout << "warning: incomplete coverage, raise --bound\n";
  }
  return 0;
}

int cmd_profile(const CommonOpts& opts, const std::string& in_path,
                const std::string& out_path, int64_t p_opt) {
  if (!in_path.empty()) {
    std::ifstream in(in_path);
    if (!in) fail(ErrorCode::ZeroInput, "cannot open " + in_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      fail(ErrorCode::MalformedProfile, std::string("bad JSON: ") + e.what());
    }
    SplittingProfile pr = import_profile(j);
    if (opts.json_out)
      std::cout << json{{"valid", true}, {"classes", pr.classes.size()}}.dump(2)
                << "\n";
    else
      std::cout << "profile valid: p=" << pr.p << " e=" << pr.e << " with "
                << pr.classes.size() << " classes\n";
    return 0;
  }

  auto L = opts.fields();
  const AbelianFieldQ& pivot = L[opts.pivot];
  if (!pivot.is_quotient_cyclic())
    fail(ErrorCode::NoCyclicFactor, "designated pivot factor is not cyclic");
  auto fs = factorize64(pivot.degree());
  int64_t p = p_opt;
  if (p == 0) {
    if (fs.size() != 1)
      fail(ErrorCode::ZeroInput,
           "pivot degree has several prime factors; choose one with --p");
    p = fs[0].first;
  }
  bool divides = false;
  for (auto [q, k] : fs)
    if (q == p) divides = true;
  if (!divides)
    fail(ErrorCode::ZeroInput, "--p must divide the pivot degree");

  std::vector<AbelianFieldQ> others;
  for (size_t i = 0; i < L.size(); ++i)
    if (i != opts.pivot) others.push_back(L[i]);
  Context ctx =
      make_context(pivot.p_part_subfield(p, opts.limits()), others, opts.limits());
  json j = export_profile(build_profile(ctx));

  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) fail(ErrorCode::ZeroInput, "cannot open " + out_path);
    out << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multinorm: Hasse principle for products of abelian fields over Q"};
  app.require_subcommand(1);

  CommonOpts sha_opts, decide_opts, knot_opts, profile_opts;
  std::string c_text;
  int64_t bound = 20;
  std::string profile_in, profile_out;
  int64_t profile_p = 0;

  CLI::App* sha = app.add_subcommand("sha", "obstruction group of a product");
  add_common(sha, sha_opts);

  CLI::App* dec = app.add_subcommand("decide", "decide N(t) = c");
  add_common(dec, decide_opts);
  dec->add_option("--c", c_text, "target rational, as num or num/den")->required();

  CLI::App* knot = app.add_subcommand("knot", "knot group representatives");
  add_common(knot, knot_opts);
  knot->add_option("--bound", bound, "height bound for the scan");

  CLI::App* profile =
      app.add_subcommand("profile", "export or validate a splitting profile");
  add_common(profile, profile_opts);
  profile->add_option("--profile-in", profile_in, "validate this profile JSON");
  profile->add_option("--profile-out", profile_out,
                      "write the exported profile here ('-' = stdout)");
  profile->add_option("--p", profile_p, "prime selecting the pivot p-part");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sha->parsed()) return cmd_sha(sha_opts);
    if (dec->parsed()) return cmd_decide(decide_opts, c_text);
    if (knot->parsed()) return cmd_knot(knot_opts, bound);
    if (profile->parsed())
      return cmd_profile(profile_opts, profile_in, profile_out, profile_p);
  } catch (const multinorm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
