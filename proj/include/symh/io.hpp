#pragma once

#include <symh/util.hpp>

#include <string>
#include <vector>

namespace symh {

// Deterministic float formatting shared by all emitters (reproducibility).
std::string format_g17(double v);

// FNV-1a 64-bit content hash; used for cache keys and manifests.
uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 14695981039346656037ULL);
uint64_t fnv1a64(const std::string& s, uint64_t seed = 14695981039346656037ULL);
std::string hash_hex(uint64_t h);

void write_text_file(const std::string& path, const std::string& body);
std::string read_text_file(const std::string& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string to_string() const;
};

}  // namespace symh
