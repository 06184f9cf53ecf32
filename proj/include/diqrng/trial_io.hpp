#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>

#include "diqrng/trial.hpp"

namespace diqrng {

// DIRT1: "DIRT1", u64 little-endian trial count, then one wire byte per trial.
inline constexpr char kDirtMagic[5] = {'D', 'I', 'R', 'T', '1'};

void write_dirt1(std::ostream& out, const TrialStream& trials);
TrialStream read_dirt1(std::istream& in);
void write_dirt1_file(const std::filesystem::path& path, const TrialStream& trials);
TrialStream read_dirt1_file(const std::filesystem::path& path);

// {"x0y0": [N_00, N_01, N_10, N_11], ...}, first index = Alice outcome.
nlohmann::json counts_to_json(const CountsTable& counts);
CountsTable counts_from_json(const nlohmann::json& j);

// The recorded table of the 6.895e10-trial run, stored literally: each row's
// columns were printed in the order ab = 00, 10, 01, 11.
CountsTable published_counts();

}  // namespace diqrng
