#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aug3d/clustering.hpp"
#include "aug3d/sampling.hpp"

namespace aug3d {

// {"per_cluster_mean":[...],"global_mean":..,"global_min":..,
//  "zero_pair_fraction":..,"flagged_clusters":[...]}
std::string quality_to_json(const QualityReport& q);
QualityReport parse_quality_json(std::string_view json);

// {"boxes":[{"min":[x,y],"max":[x,y],"members":[...]}]}
std::string boxes_to_json(std::span<const Box2D> boxes);
std::vector<Box2D> parse_boxes_json(std::string_view json);

std::string domes_to_json(std::span<const DomeSpec> domes, DomeMode mode, std::uint64_t seed);

// Binary P5, 0 = empty, 255 = occupied. Row 0 is the minimum-y row.
std::string encode_mask_pgm(const BinaryMask& mask);

}  // namespace aug3d
