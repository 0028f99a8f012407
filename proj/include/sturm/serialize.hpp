#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>

#include "sturm/partition.hpp"
#include "sturm/spectral.hpp"
#include "sturm/transfer.hpp"

namespace sturm {

// Insertion-ordered JSON keeps record layouts stable byte-for-byte.
using Json = nlohmann::ordered_json;

Json to_json(const ContinuedFraction& cf);  // plain coefficient array
ContinuedFraction cf_from_json(const Json& j);

Json to_json(const Word& w);
Word word_from_json(const Json& j);

Json to_json(const Partition& p);
Json to_json(const TwoBlockSplit& s);
Json to_json(const Embedding& e);
Json to_json(const Frame& f);
Json to_json(const TransferProduct& p);
Json to_json(const SpectrumApprox& s);
Json to_json(const LyapunovEstimate& e);
Json to_json(const SubadditiveLimit& l);
Json to_json(const EnergyGrowth& g);
Json to_json(const GrowthFit& f);
Json to_json(const CertifiedBound& b);

// Packed binary word format: "SBW1", little-endian u64 letter count, then
// ceil(n/8) bytes, bit k of byte j = letter 8j + k.
void write_word_binary(std::ostream& os, const Word& w);
Word read_word_binary(std::istream& is);

// Flat sample table shared by the analysis records; unused fields stay blank.
// Columns: lambda,E_re,E_im,theta,n,len,lognorm,norm_rate,f_upper,inf_f,band_id
class CsvTable {
 public:
  CsvTable();
  void add_spectrum(const SpectrumApprox& s);
  void add_lyapunov(const LyapunovEstimate& e);
  void add_phase(double lambda, Energy E, const std::string& theta,
                 std::span<const PhaseSample> samples);
  void add_growth(double lambda, const EnergyGrowth& g);
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

// Shortest-representation double formatting used across all result files.
std::string format_double(double v);

// Human-readable schema of every record type, for `--schema`.
std::string schema_text();

}  // namespace sturm
