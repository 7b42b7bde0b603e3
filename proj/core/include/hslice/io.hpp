#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hslice/cube.hpp"
#include "hslice/decompose.hpp"
#include "hslice/hyperplane.hpp"
#include "hslice/scales.hpp"
#include "hslice/witness.hpp"

namespace hslice::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Collection files: {"n": int, "mode": "exact"|"float", "hyperplanes":
// [{"a": [...], "b": ...}]}. Exact mode stores coefficients as strings
// ("p", "-p", or "p/q"); float mode stores plain numbers.
std::string collection_to_json_text(const AnyCollection& c);
AnyCollection collection_from_json_text(const std::string& text);
void save_collection(const AnyCollection& c, const std::string& path);
AnyCollection load_collection(const std::string& path);

// {"delta": str, "groups": [[int]], "group_norms": [str]}. Norms and delta
// are decimal strings: scale chains span ranges that overflow double.
std::string certificate_to_json_text(const scales::ScaleCertificate& cert);
scales::ScaleCertificate certificate_from_json_text(const std::string& text);

std::string decomposition_to_json_text(const DecompositionResult& r);

std::string witness_to_json_text(const WitnessResult& r);

// key=value lines, fixed order; no timestamps anywhere
std::string cover_report_text(const CoverReport& rep);

// columns: base_bits_hex, flip_index
std::string unsliced_to_csv(const CoverReport& rep);

// Ordered key=value run manifest. Everything that shaped a run (seed,
// worker count, parameter overrides) goes through here verbatim.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value);
    void add(std::string key, uint64_t value);
    void add(std::string key, int value);
    void add(std::string key, double value);  // %.17g
};

std::string manifest_text(const Manifest& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace hslice::io
