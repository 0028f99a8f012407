#include "sturm/serialize.hpp"

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>

#include "sturm/errors.hpp"

namespace sturm {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw InternalError("double formatting failed");
  return std::string(buf, end);
}

static Json energy_json(Energy e) { return Json::array({e.real(), e.imag()}); }

Json to_json(const ContinuedFraction& cf) { return Json(cf.coeffs()); }

ContinuedFraction cf_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("continued fraction must be a nonempty array");
  std::vector<std::int64_t> a;
  a.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ConfigError("continued fraction coefficients must be integers");
    a.push_back(v.get<std::int64_t>());
  }
  return ContinuedFraction(std::move(a));
}

Json to_json(const Word& w) {
  return Json{{"length", w.size()}, {"letters", w.str()}};
}

Word word_from_json(const Json& j) {
  if (j.is_string()) return Word::from_string(j.get<std::string>());
  if (j.is_object() && j.contains("letters")) {
    Word w = Word::from_string(j.at("letters").get<std::string>());
    if (j.contains("length") && j.at("length").get<std::uint64_t>() != w.size())
      throw ConfigError("word length field disagrees with its letters");
    return w;
  }
  throw ConfigError("expected a word (string or {length, letters})");
}

static const char* tag_name(BlockTag t) { return t == BlockTag::cur ? "cur" : "prev"; }

Json to_json(const Partition& p) {
  Json blocks = Json::array();
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    blocks.push_back(Json{{"tag", tag_name(p.blocks[i])},
                          {"start", p.spans[i].start},
                          {"end", p.spans[i].end}});
  }
  return Json{{"level", p.level},
              {"a", p.head.str()},
              {"blocks", std::move(blocks)},
              {"b", p.tail.str()}};
}

Json to_json(const TwoBlockSplit& s) {
  return Json{{"level", s.level}, {"x", s.left.str()}, {"y", s.right.str()}};
}

Json to_json(const Embedding& e) {
  return Json{{"level", e.level}, {"offset", e.offset}};
}

Json to_json(const Frame& f) {
  return Json{{"xLength", f.left.size()},
              {"yLength", f.right.size()},
              {"x", f.left.str()},
              {"y", f.right.str()}};
}

Json to_json(const TransferProduct& p) {
  auto entry = [](Energy e) { return Json::array({e.real(), e.imag()}); };
  return Json{{"matrix", Json::array({entry(p.m.a), entry(p.m.b), entry(p.m.c), entry(p.m.d)})},
              {"logScale", p.log_scale},
              {"length", p.length},
              {"errorBound", p.det_error_bound},
              {"logNorm", p.log_norm()}};
}

Json to_json(const SpectrumApprox& s) {
  Json bands = Json::array();
  for (const auto& b : s.bands)
    bands.push_back(Json{{"lo", b.lo}, {"hi", b.hi}, {"mid", b.mid()}, {"width", b.width()}});
  return Json{{"lambda", s.lambda},
              {"level", s.level},
              {"window", Json::array({s.window_lo, s.window_hi})},
              {"grid", s.grid},
              {"traceTol", s.trace_tol},
              {"edgeWarning", s.edge_warning},
              {"bands", std::move(bands)}};
}

Json to_json(const LyapunovEstimate& e) {
  Json samples = Json::array();
  for (const auto& s : e.samples)
    samples.push_back(Json{{"level", s.level},
                           {"length", s.length},
                           {"rate", s.rate},
                           {"prevRate", s.prev_rate},
                           {"fUpper", s.f_upper},
                           {"infF", s.inf_f},
                           {"detErrorBound", s.det_error_bound}});
  return Json{{"lambda", e.lambda},
              {"energy", energy_json(e.energy)},
              {"tol", e.tol},
              {"gamma", e.gamma},
              {"infF", e.inf_f},
              {"certificateGap", e.certificate_gap},
              {"converged", e.converged},
              {"samples", std::move(samples)}};
}

Json to_json(const SubadditiveLimit& l) {
  Json samples = Json::array();
  for (const auto& s : l.samples)
    samples.push_back(Json{{"level", s.level},
                           {"length", s.length},
                           {"value", s.value},
                           {"rate", s.rate},
                           {"fUpper", s.f_upper}});
  return Json{{"tol", l.tol},
              {"limit", l.limit},
              {"certificateGap", l.certificate_gap},
              {"converged", l.converged},
              {"samples", std::move(samples)}};
}

static Json to_json(const EnvelopeFit& f) {
  return Json{{"intercept", f.intercept}, {"slope", f.slope}};
}

Json to_json(const EnergyGrowth& g) {
  Json points = Json::array();
  for (const auto& p : g.points)
    points.push_back(Json{{"length", p.length},
                          {"offset", p.offset},
                          {"logNorm", p.log_norm},
                          {"fromPrefix", p.from_prefix},
                          {"detErrorBound", p.det_error_bound}});
  return Json{{"energy", energy_json(g.energy)},
              {"fittedLength", g.fitted_length},
              {"prefixFit", to_json(g.prefix_fit)},
              {"fit", to_json(g.fit)},
              {"logF", g.log_f},
              {"maxViolation", g.max_violation},
              {"points", std::move(points)}};
}

Json to_json(const GrowthFit& f) {
  Json energies = Json::array();
  for (const auto& g : f.energies) energies.push_back(to_json(g));
  return Json{{"lambda", f.lambda},
              {"maxLength", f.max_length},
              {"windowsPerLength", f.windows_per_length},
              {"seed", f.seed},
              {"densityWarning", f.density_warning},
              {"energies", std::move(energies)}};
}

Json to_json(const CertifiedBound& b) {
  return Json{{"directLogNorm", b.direct_log_norm},
              {"boundLog", b.bound_log},
              {"envelopeLog", b.envelope_log},
              {"pathLog", b.path_log},
              {"route", b.route},
              {"reversalPrefixLen", b.reversal_prefix_len},
              {"split", to_json(b.split)}};
}

// --------------------------------------------------------------------------
// Packed binary words.

static constexpr char kWordMagic[4] = {'S', 'B', 'W', '1'};

void write_word_binary(std::ostream& os, const Word& w) {
  os.write(kWordMagic, 4);
  std::uint64_t n = w.size();
  char len[8];
  for (int i = 0; i < 8; ++i) len[i] = static_cast<char>((n >> (8 * i)) & 0xff);
  os.write(len, 8);
  std::uint64_t bytes = (n + 7) / 8;
  for (std::uint64_t j = 0; j < bytes; ++j) {
    unsigned byte = 0;
    for (int k = 0; k < 8; ++k) {
      std::uint64_t idx = 8 * j + static_cast<std::uint64_t>(k);
      if (idx < n && w.letter(idx)) byte |= 1u << k;
    }
    os.put(static_cast<char>(byte));
  }
  if (!os) throw ResourceError("word write failed");
}

Word read_word_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || !std::equal(magic, magic + 4, kWordMagic))
    throw ConfigError("not a packed word stream (bad magic)");
  char len[8];
  is.read(len, 8);
  if (!is) throw ConfigError("truncated packed word header");
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(static_cast<unsigned char>(len[i])) << (8 * i);
  if (n > (std::uint64_t{1} << 40)) throw ConfigError("packed word length is implausibly large");
  Word w;
  std::uint64_t bytes = (n + 7) / 8;
  for (std::uint64_t j = 0; j < bytes; ++j) {
    int ch = is.get();
    if (ch < 0) throw ConfigError("truncated packed word payload");
    for (int k = 0; k < 8 && 8 * j + static_cast<std::uint64_t>(k) < n; ++k)
      w.push_back((ch >> k) & 1);
  }
  return w;
}

// --------------------------------------------------------------------------
// CSV sample table.

static const char kCsvHeader[] =
    "lambda,E_re,E_im,theta,n,len,lognorm,norm_rate,f_upper,inf_f,band_id\n";

CsvTable::CsvTable() : text_(kCsvHeader) {}

namespace {

struct CsvRow {
  std::string cells[11];
  std::string& operator[](int i) { return cells[i]; }
  std::string line() const {
    std::string out;
    for (int i = 0; i < 11; ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
    return out;
  }
};

enum CsvCol {
  col_lambda = 0, col_e_re, col_e_im, col_theta, col_n, col_len,
  col_lognorm, col_norm_rate, col_f_upper, col_inf_f, col_band_id
};

}  // namespace

void CsvTable::add_spectrum(const SpectrumApprox& s) {
  for (std::size_t i = 0; i < s.bands.size(); ++i) {
    CsvRow r;
    r[col_lambda] = format_double(s.lambda);
    r[col_e_re] = format_double(s.bands[i].mid());
    r[col_e_im] = "0";
    r[col_n] = std::to_string(s.level);
    r[col_band_id] = std::to_string(i + 1);
    text_ += r.line();
  }
}

void CsvTable::add_lyapunov(const LyapunovEstimate& e) {
  for (const auto& s : e.samples) {
    CsvRow r;
    r[col_lambda] = format_double(e.lambda);
    r[col_e_re] = format_double(e.energy.real());
    r[col_e_im] = format_double(e.energy.imag());
    r[col_n] = std::to_string(s.level);
    r[col_len] = std::to_string(s.length);
    r[col_lognorm] = format_double(s.rate * static_cast<double>(s.length));
    r[col_norm_rate] = format_double(s.rate);
    r[col_f_upper] = format_double(s.f_upper);
    r[col_inf_f] = format_double(e.inf_f);
    text_ += r.line();
  }
}

void CsvTable::add_phase(double lambda, Energy E, const std::string& theta,
                         std::span<const PhaseSample> samples) {
  for (const auto& s : samples) {
    CsvRow r;
    r[col_lambda] = format_double(lambda);
    r[col_e_re] = format_double(E.real());
    r[col_e_im] = format_double(E.imag());
    r[col_theta] = theta;
    r[col_len] = std::to_string(s.length);
    r[col_lognorm] = format_double(s.rate * static_cast<double>(s.length));
    r[col_norm_rate] = format_double(s.rate);
    text_ += r.line();
  }
}

void CsvTable::add_growth(double lambda, const EnergyGrowth& g) {
  for (const auto& p : g.points) {
    CsvRow r;
    r[col_lambda] = format_double(lambda);
    r[col_e_re] = format_double(g.energy.real());
    r[col_e_im] = format_double(g.energy.imag());
    r[col_len] = std::to_string(p.length);
    r[col_lognorm] = format_double(p.log_norm);
    r[col_norm_rate] = format_double(p.log_norm / static_cast<double>(p.length));
    text_ += r.line();
  }
}

std::string schema_text() {
  return R"(Result record schemas (JSON unless noted)

continued fraction      [a1, a2, ...]                 integer coefficients, all >= 1
word                    {length, letters}             letters is the 0/1 string
word (binary)           "SBW1" + u64le length + packed bits, bit k of byte j = letter 8j+k
partition               {level, a, blocks, b}         blocks: [{tag: cur|prev, start, end}],
                                                      1-based closed spans; a/b are the edge fragments
two-block split         {level, x, y}                 w = xy, x suffix of a level word, y prefix of the next
embedding               {level, offset}               smallest level word longer than w, 1-based offset
frame                   {xLength, yLength, x, y}      margins around w inside the level+3 word
transfer product        {matrix, logScale, length, errorBound, logNorm}
                                                      matrix: [[re,im] x 4] row-major, true matrix =
                                                      matrix * exp(logScale); errorBound bounds |det-1|
spectrum                {lambda, level, window, grid, traceTol, edgeWarning, bands}
                                                      bands: [{lo, hi, mid, width}]
lyapunov estimate       {lambda, energy, tol, gamma, infF, certificateGap, converged, samples}
                                                      samples: [{level, length, rate, fUpper}]
subadditive limit       {tol, limit, certificateGap, converged, samples}
growth fit              {lambda, maxLength, windowsPerLength, seed, densityWarning, energies}
  per energy            {energy, fittedLength, prefixFit, fit, logF, maxViolation, points}
                                                      fits are {intercept, slope}: lognorm <=
                                                      intercept + slope * ln(length)
certified bound         {directLogNorm, boundLog, envelopeLog, pathLog, route,
                         reversalPrefixLen, split}

CSV sample table (shared by spectrum/lyapunov/growth outputs; unused fields blank)
  lambda,E_re,E_im,theta,n,len,lognorm,norm_rate,f_upper,inf_f,band_id
)";
}

}  // namespace sturm
