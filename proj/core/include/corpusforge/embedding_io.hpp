#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "corpusforge/features.hpp"

namespace corpusforge {

// Embedding container. Binary layout ("EMB1"):
//   magic "EMB1" | dim u32 LE | row count u32 LE |
//   per row: id length u16 LE | UTF-8 id | dim x f32 LE
// A tsv fallback (id<TAB>v1<TAB>...<TAB>vN) is accepted on load; detection is
// by the magic bytes. Values are carried as f32 on disk.

FeatureMatrix load_embedding_matrix(const std::string& path,
                                    std::optional<std::size_t> expected_dim = std::nullopt);

void write_embedding_matrix(const FeatureMatrix& features, const std::string& path);

}  // namespace corpusforge
