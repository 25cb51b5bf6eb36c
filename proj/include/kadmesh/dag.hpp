// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kadmesh/ident.hpp"

namespace kadmesh {

inline constexpr size_t kChunkSize = 262144;

struct Block {
  std::vector<uint8_t> data;
  Cid cid;
};

// Flat root node over a list of child blocks. Its cid is computed over the
// canonical serialization of the link list, so any child change propagates.
struct DagNode {
  std::vector<Cid> links;
  Cid cid;
};

// Fixed-size chunks of kChunkSize bytes, last chunk possibly shorter.
// Empty content yields a single empty block.
std::vector<Block> chunk(std::span<const uint8_t> content);

// Canonical root serialization: concatenation of child cid byte forms,
// each length-prefixed by an unsigned varint.
std::vector<uint8_t> serialize_links(const std::vector<Cid>& links);

// Throws std::invalid_argument on an empty block list.
DagNode build_root(const std::vector<Block>& blocks);

// (total blocks, distinct block cids) over a set of contents.
std::pair<size_t, size_t> dedup_count(
    const std::vector<std::vector<uint8_t>>& contents);

}  // namespace kadmesh
