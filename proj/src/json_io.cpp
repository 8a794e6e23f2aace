#include "bktower/json_io.hpp"

#include <fstream>
#include <iostream>

#include "bktower/errors.hpp"
#include "bktower/padic.hpp"

namespace bkt {

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

json parse_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Err::ParseError, "malformed JSON");
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_json_text(text);
}

void write_json_output(const std::string& path, const json& j) {
  const std::string text = canonical_dump(j);
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot open " + path + " for writing");
  out << text;
  if (!out) fail(Err::IoError, "write failed: " + path);
}

// ---- helpers --------------------------------------------------------------

static void need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(Err::SchemaMismatch, std::string("missing key \"") + key + "\"");
}

static long get_long(const json& j, const char* key) {
  need(j, key);
  if (!j[key].is_number_integer()) fail(Err::SchemaMismatch, std::string(key) + " must be an integer");
  return j[key].get<long>();
}

static std::string get_string(const json& j, const char* key) {
  need(j, key);
  if (!j[key].is_string()) fail(Err::SchemaMismatch, std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

static const json& get_array(const json& j, const char* key) {
  need(j, key);
  if (!j[key].is_array()) fail(Err::SchemaMismatch, std::string(key) + " must be an array");
  return j[key];
}

static void check_version(const json& j) {
  if (get_long(j, "schema_version") != kSchemaVersion)
    fail(Err::SchemaMismatch, "unsupported schema_version");
}

static mpz_class mpz_from_string(const std::string& s) {
  mpz_class z;
  if (mpz_set_str(z.get_mpz_t(), s.c_str(), 10) != 0)
    fail(Err::SchemaMismatch, "bad integer literal: " + s);
  return z;
}

static RingTag tag_from_name(const std::string& s) {
  if (s == "frakS") return RingTag::FrakS;
  if (s == "S") return RingTag::S;
  if (s == "fracS") return RingTag::FracS;
  fail(Err::SchemaMismatch, "unknown ring tag: " + s);
}

// ---- elements -------------------------------------------------------------

json element_to_json(const TowerElement& x) {
  json coeffs = json::array();
  const long p = x.ctx->p;
  for (long a = 0; a <= x.deg_stored(); ++a) {
    const mpz_class& c = x.c[static_cast<size_t>(a)];
    if (c == 0) continue;
    mpz_class unit = c;
    long v = 0;
    while (mpz_divisible_ui_p(unit.get_mpz_t(), static_cast<unsigned long>(p)) != 0) {
      mpz_divexact_ui(unit.get_mpz_t(), unit.get_mpz_t(), static_cast<unsigned long>(p));
      ++v;
    }
    coeffs.push_back(json::array({a, v - x.scale, unit.get_str()}));
  }
  json j;
  j["coeffs"] = std::move(coeffs);
  j["kappa"] = x.kappa >= kExactDigits ? -1 : x.kappa;
  j["level"] = x.level;
  j["tag"] = tag_name(x.tag);
  j["udeg"] = x.udeg >= kFullDegree ? -1 : x.udeg;
  return j;
}

TowerElement element_from_json(const json& j, const PrecisionContext& ctx) {
  TowerElement x;
  x.ctx = &ctx;
  x.level = get_long(j, "level");
  if (x.level < 0 || x.level > ctx.depth) fail(Err::SchemaMismatch, "element level out of range");
  x.tag = tag_from_name(get_string(j, "tag"));
  const long kappa = get_long(j, "kappa");
  x.kappa = kappa < 0 ? kExactDigits : kappa;
  const long udeg = get_long(j, "udeg");
  x.udeg = udeg < 0 ? kFullDegree : udeg;

  const json& coeffs = get_array(j, "coeffs");
  long scale = 0;
  for (const json& t : coeffs) {
    if (!t.is_array() || t.size() != 3)
      fail(Err::SchemaMismatch, "coefficient triple must be [degree, valuation, unit]");
    const long v = t[1].get<long>();
    if (-v > scale) scale = -v;
  }
  x.scale = scale;
  for (const json& t : coeffs) {
    const long a = t[0].get<long>();
    const long v = t[1].get<long>();
    if (a < 0 || a >= ctx.cutoff(x.level)) fail(Err::SchemaMismatch, "coefficient degree out of range");
    if (static_cast<long>(x.c.size()) <= a) x.c.resize(static_cast<size_t>(a) + 1, 0);
    if (!t[2].is_string()) fail(Err::SchemaMismatch, "coefficient unit must be a decimal string");
    mpz_class unit = mpz_from_string(t[2].get<std::string>());
    x.c[static_cast<size_t>(a)] = unit * ctx.p_pow(v + scale);
  }
  x.normalize();
  return x;
}

// ---- context --------------------------------------------------------------

json context_to_json(const PrecisionContext& ctx) {
  json e_coeffs = json::array();
  for (const mpz_class& z : ctx.E) e_coeffs.push_back(z.get_str());
  json j;
  j["E"] = std::move(e_coeffs);
  j["M"] = ctx.M;
  j["N"] = ctx.N;
  j["depth"] = ctx.depth;
  j["e"] = ctx.e;
  j["p"] = ctx.p;
  return j;
}

std::shared_ptr<PrecisionContext> context_from_json(const json& j) {
  std::vector<mpz_class> E;
  for (const json& t : get_array(j, "E")) {
    if (!t.is_string()) fail(Err::SchemaMismatch, "E coefficients must be decimal strings");
    E.push_back(mpz_from_string(t.get<std::string>()));
  }
  auto ctx = std::make_shared<PrecisionContext>(get_long(j, "p"), get_long(j, "e"),
                                                get_long(j, "N"), get_long(j, "M"),
                                                get_long(j, "depth"), std::move(E));
  ctx->validate();
  return ctx;
}

// ---- modules --------------------------------------------------------------

static json matrix_to_json(const SMat& m) {
  json arr = json::array();
  for (const TowerElement& x : m.a) arr.push_back(element_to_json(x));
  return arr;
}

static SMat matrix_from_json(const json& arr, const PrecisionContext& ctx, long d) {
  if (static_cast<long>(arr.size()) != d * d)
    fail(Err::SchemaMismatch, "matrix must hold d*d elements");
  SMat m = SMat::zeros(ctx, 0, d, d);
  for (long k = 0; k < d * d; ++k) {
    m.a[static_cast<size_t>(k)] = element_from_json(arr[static_cast<size_t>(k)], ctx);
    if (m.a[static_cast<size_t>(k)].level != 0)
      fail(Err::SchemaMismatch, "module matrices live at level 0");
  }
  return m;
}

json module_to_json(const FilteredBkModule& m, bool divided_power_semantics) {
  json j = context_to_json(m.ctx());
  j["A"] = matrix_to_json(m.A);
  j["B"] = matrix_to_json(m.B);
  j["d"] = m.d;
  j["r"] = m.r;
  j["schema_version"] = kSchemaVersion;
  j["semantics"] = divided_power_semantics ? "S" : "frakS";
  return j;
}

ModuleDoc module_from_json(const json& j) {
  check_version(j);
  ModuleDoc doc;
  doc.ctx = context_from_json(j);
  doc.mod.ctx_ = doc.ctx.get();
  doc.mod.d = get_long(j, "d");
  doc.mod.r = get_long(j, "r");
  if (doc.mod.d < 1) fail(Err::SchemaMismatch, "d must be positive");
  doc.mod.A = matrix_from_json(get_array(j, "A"), *doc.ctx, doc.mod.d);
  doc.mod.B = matrix_from_json(get_array(j, "B"), *doc.ctx, doc.mod.d);
  const std::string sem = get_string(j, "semantics");
  if (sem != "S" && sem != "frakS") fail(Err::SchemaMismatch, "unknown semantics: " + sem);
  doc.divided_power_semantics = sem == "S";
  return doc;
}

// ---- chains ---------------------------------------------------------------

json chain_to_json(const ModuleChain& c, bool divided_power_semantics) {
  json elems = json::array();
  for (long n = 0; n <= c.depth; ++n) {
    json w = json::array();
    const SMat& col = c.w[static_cast<size_t>(n)];
    for (const TowerElement& x : col.a) w.push_back(element_to_json(x));
    json entry;
    entry["n"] = n;
    entry["w"] = std::move(w);
    elems.push_back(std::move(entry));
  }
  json j;
  j["depth"] = c.depth;
  j["elems"] = std::move(elems);
  j["module_ref"] = module_to_json(c.mod, divided_power_semantics);
  j["schema_version"] = kSchemaVersion;
  return j;
}

ChainDoc chain_from_json(const json& j) {
  check_version(j);
  need(j, "module_ref");
  ModuleDoc mdoc = module_from_json(j["module_ref"]);
  ChainDoc doc;
  doc.ctx = mdoc.ctx;
  doc.divided_power_semantics = mdoc.divided_power_semantics;
  doc.chain.mod = mdoc.mod;
  doc.chain.depth = get_long(j, "depth");
  if (doc.chain.depth < 0 || doc.chain.depth > doc.ctx->depth)
    fail(Err::SchemaMismatch, "chain depth out of range");
  const json& elems = get_array(j, "elems");
  if (static_cast<long>(elems.size()) != doc.chain.depth + 1)
    fail(Err::SchemaMismatch, "chain must hold depth+1 levels");
  doc.chain.w.assign(static_cast<size_t>(doc.chain.depth) + 1, SMat{});
  for (const json& entry : elems) {
    const long n = get_long(entry, "n");
    if (n < 0 || n > doc.chain.depth) fail(Err::SchemaMismatch, "chain level index out of range");
    const json& w = get_array(entry, "w");
    if (static_cast<long>(w.size()) != doc.chain.mod.d)
      fail(Err::SchemaMismatch, "chain level must hold d coordinates");
    SMat col = SMat::zeros(*doc.ctx, n, doc.chain.mod.d, 1);
    for (long k = 0; k < doc.chain.mod.d; ++k) {
      col.at(k, 0) = element_from_json(w[static_cast<size_t>(k)], *doc.ctx);
      if (col.at(k, 0).level != n)
        fail(Err::SchemaMismatch, "chain coordinate level disagrees with its slot");
    }
    doc.chain.w[static_cast<size_t>(n)] = col;
  }
  for (long n = 0; n <= doc.chain.depth; ++n)
    if (doc.chain.w[static_cast<size_t>(n)].a.empty())
      fail(Err::SchemaMismatch, "chain level " + std::to_string(n) + " missing");
  return doc;
}

}  // namespace bkt
