// Command-line front end: runs the verification suites, descends chains, and
// validates module presentations, emitting JSON certificates.
//
// Exit codes: 0 all cases pass, 1 at least one failure, 2 inconclusive cases
// only, 3 configuration or I/O problem.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bktower/errors.hpp"
#include "bktower/json_io.hpp"
#include "bktower/suites.hpp"

namespace {

using bkt::json;

std::vector<mpz_class> parse_poly(const std::string& text) {
  std::vector<mpz_class> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.emplace_back(cur);
      cur.clear();
    }
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == ';') flush();
    else if (ch == '-' || (ch >= '0' && ch <= '9')) cur.push_back(ch);
    else bkt::fail(bkt::Err::ConfigInvalid, std::string("bad character in --E: ") + ch);
  }
  flush();
  if (out.empty()) bkt::fail(bkt::Err::ConfigInvalid, "--E parsed to an empty coefficient list");
  return out;
}

json er_json(const bkt::EqualityReport& er) {
  json j;
  j["digits"] = er.digits >= bkt::kExactDigits ? -1 : er.digits;
  j["first_bad_degree"] = er.first_bad_degree;
  j["udeg"] = er.udeg >= bkt::kFullDegree ? -1 : er.udeg;
  return j;
}

int emit(const bkt::Certificate& cert, const std::string& out) {
  bkt::write_json_output(out, cert.to_json());
  return cert.exit_code();
}

int run_descend(const std::string& in, const std::string& out) {
  bkt::ChainDoc doc = bkt::chain_from_json(bkt::load_json_file(in));
  bkt::DescentResult ds = bkt::descend(doc.chain);

  bkt::Certificate cert;
  cert.suite = "descend";
  cert.config_echo = json{{"context", bkt::context_to_json(*doc.ctx)}, {"source", in}};
  json data;
  data["digits"] = ds.digits >= bkt::kExactDigits ? -1 : ds.digits;
  data["recovery"] = er_json(ds.recovery);
  data["residual_fil"] = ds.residual_fil;
  json steps = json::array();
  for (const bkt::DescentStep& st : ds.steps)
    steps.push_back(json{{"fil_realized", st.fil_realized},
                         {"fil_target", st.fil_target},
                         {"level", st.level}});
  data["steps"] = std::move(steps);
  data["u_window"] = ds.u_window;
  if (ds.verdict == bkt::Verdict::Pass) {
    json w = json::array();
    for (long k = 0; k < ds.w.rows; ++k) w.push_back(bkt::element_to_json(ds.w.at(k, 0)));
    data["recovered"] = std::move(w);
  }
  cert.add("descent", ds.verdict, ds.detail.empty() ? "chain descends to an integral vector" : ds.detail,
           std::move(data));
  return emit(cert, out);
}

int run_validate(const std::string& in, const std::string& out) {
  bkt::ModuleDoc doc = bkt::module_from_json(bkt::load_json_file(in));
  bkt::ModuleValidation val = bkt::validate(doc.mod);

  bkt::Certificate cert;
  cert.suite = "validate";
  cert.config_echo = json{{"context", bkt::context_to_json(*doc.ctx)},
                          {"d", doc.mod.d},
                          {"r", doc.mod.r},
                          {"source", in}};
  json data;
  data["det_unit"] = val.det_unit;
  data["product_ab"] = er_json(val.ab);
  data["product_ba"] = er_json(val.ba);
  cert.add("module-valid", val.ok ? bkt::Verdict::Pass : bkt::Verdict::Fail,
           val.ok ? "A*B = B*A = E^r and det(A) generates the filtration" : val.detail,
           std::move(data));
  return emit(cert, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact finite-precision arithmetic for filtered Frobenius modules "
               "over a power-series tower: verification suites, chain descent, "
               "and presentation validation."};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file (flags override)");

  bkt::SuiteConfig cfg;
  std::string e_poly, name, in_path;

  app.add_option("--p", cfg.p, "Odd prime p")->capture_default_str();
  app.add_option("--e", cfg.e, "Degree of the distinguished polynomial")->capture_default_str();
  app.add_option("--E", e_poly,
                 "Ascending coefficients of the distinguished polynomial, comma separated "
                 "(default: u^e + p)");
  app.add_option("--N", cfg.N, "Coefficient digit window")->capture_default_str();
  app.add_option("--M", cfg.M, "Base u-degree window (0 = suite default)")->capture_default_str();
  app.add_option("--depth", cfg.depth, "Tower depth")->capture_default_str();
  app.add_option("--d", cfg.d, "Maximum module rank")->capture_default_str();
  app.add_option("--r", cfg.r, "Maximum filtration height (< p-1)")->capture_default_str();
  app.add_option("--r-min", cfg.r_min, "Minimum filtration height")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Master seed; all randomness derives from it")
      ->capture_default_str();
  app.add_option("--count", cfg.count, "Number of randomized cases (0 = suite default)")
      ->capture_default_str();
  app.add_option("--min-digits", cfg.min_digits,
                 "Certified digits required for a pass (-1 = N-2)")
      ->capture_default_str();
  app.add_option("--suite", cfg.suite, "ring-suite flavor: identities | limit")
      ->capture_default_str();
  app.add_option("--out", cfg.out, "Certificate output path (empty or - = stdout)");
  app.add_flag("--timing", cfg.record_timing, "Record wall-clock timing in the certificate");

  CLI::App* ring = app.add_subcommand("ring-suite", "Ring-level identity batteries");
  CLI::App* round = app.add_subcommand("roundtrip", "Random module -> chain -> descent round trips");
  CLI::App* example = app.add_subcommand("example", "Worked rank-1 examples");
  example->add_option("--name", name, "multiplicative (mu-p-infinity) | etale (qp-zp)")->required();
  CLI::App* desc = app.add_subcommand("descend", "Descend a serialized chain");
  desc->add_option("--in", in_path, "Chain JSON file")->required();
  CLI::App* valid = app.add_subcommand("validate", "Validate a serialized module presentation");
  valid->add_option("--in", in_path, "Module JSON file")->required();
  for (CLI::App* s : {ring, round, example, desc, valid}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (cfg.suite.empty()) cfg.suite = "identities";
    if (!e_poly.empty()) cfg.E = parse_poly(e_poly);

    if (ring->parsed()) {
      if (cfg.suite == "identities") return emit(bkt::ring_suite(cfg), cfg.out);
      if (cfg.suite == "limit") return emit(bkt::limit_suite(cfg), cfg.out);
      bkt::fail(bkt::Err::ConfigInvalid, "--suite must be identities or limit, got " + cfg.suite);
    }
    if (round->parsed()) return emit(bkt::roundtrip_suite(cfg), cfg.out);
    if (example->parsed()) return emit(bkt::example_suite(cfg, name), cfg.out);
    if (desc->parsed()) return run_descend(in_path, cfg.out);
    if (valid->parsed()) return run_validate(in_path, cfg.out);
    bkt::fail(bkt::Err::ConfigInvalid, "no subcommand selected");
  } catch (const bkt::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", bkt::err_name(e.code()), e.what());
    switch (e.code()) {
      case bkt::Err::ConfigInvalid:
      case bkt::Err::ParseError:
      case bkt::Err::SchemaMismatch:
      case bkt::Err::IoError:
        return 3;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
