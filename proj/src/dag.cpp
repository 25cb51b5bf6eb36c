// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/dag.hpp"

#include <set>
#include <stdexcept>

#include "kadmesh/varint.hpp"

namespace kadmesh {

std::vector<Block> chunk(std::span<const uint8_t> content) {
  std::vector<Block> blocks;
  size_t offset = 0;
  do {
    const size_t len = std::min(kChunkSize, content.size() - offset);
    Block block;
    block.data.assign(content.begin() + offset,
                      content.begin() + offset + len);
    block.cid = make_cid(block.data, CidVersion::v0);
    blocks.push_back(std::move(block));
    offset += len;
  } while (offset < content.size());
  return blocks;
}

std::vector<uint8_t> serialize_links(const std::vector<Cid>& links) {
  std::vector<uint8_t> out;
  for (const auto& link : links) {
    const auto bytes = link.bytes();
    varint_encode(bytes.size(), out);
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

DagNode build_root(const std::vector<Block>& blocks) {
  if (blocks.empty()) {
    throw std::invalid_argument("build_root: empty block list");
  }
  DagNode root;
  for (const auto& block : blocks) {
    root.links.push_back(block.cid);
  }
  root.cid = make_cid(serialize_links(root.links), CidVersion::v0);
  return root;
}

std::pair<size_t, size_t> dedup_count(
    const std::vector<std::vector<uint8_t>>& contents) {
  size_t total = 0;
  std::set<std::string> unique;
  for (const auto& content : contents) {
    for (const auto& block : chunk(content)) {
      ++total;
      unique.insert(block.cid.text);
    }
  }
  return {total, unique.size()};
}

}  // namespace kadmesh
