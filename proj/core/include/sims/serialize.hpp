#pragma once

#include <string>
#include <vector>

#include "sims/codebook.hpp"
#include "sims/harness.hpp"
#include "sims/seqgen.hpp"

namespace sims {

/// {family, params, K, N_SF, values[]}
std::string root_to_json(const RootSequence& root);
RootSequence root_from_json(const std::string& text);

/// Scheme, waveform parameters, root (SIMS), amplitudes and optionally the
/// codeword samples as [re, im] pairs. Loading rebuilds the codebook and, when
/// samples are present, checks them against the rebuilt codewords.
std::string codebook_to_json(const Codebook& codebook, bool include_samples);
Codebook codebook_from_json(const std::string& text);

/// Keys absent from `text` keep their value from `base`.
std::string config_to_json(const SimConfig& config);
SimConfig config_from_json(const std::string& text, const SimConfig& base = {});

std::string curve_to_json(const BerCurve& curve);
BerCurve curve_from_json(const std::string& text);

std::string traces_to_json(const std::vector<ZTrace>& traces);

std::string xcorr_to_csv(const std::vector<XcorrRow>& rows);

/// FNV-1a over the configuration, excluding settings that cannot change results
/// (worker count).
std::string config_hash(const SimConfig& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sims
