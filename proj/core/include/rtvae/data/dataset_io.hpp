#pragma once

#include "rtvae/data/encoder.hpp"

#include <filesystem>
#include <iosfwd>

namespace rtvae {

/// Encoded dataset together with the encoder that produced it.
struct DatasetCache {
    EncodedDataset data;
    EncoderState encoder;
};

// Cache file layout ("RTVD1"), all integers little-endian:
//
//   bytes  "RTVD1"                       magic, 5 bytes
//   u32    rows
//   u32    cols
//   u32    slot_count
//   slot_count x {
//     u32  name_length, name bytes (UTF-8)
//     u8   kind (0 categorical, 1 continuous)
//     u32  offset
//     u32  width
//   }
//   u8     has_labels (0 or 1)
//   rows x u8 label (0 normal, 1 anomaly)          only when has_labels = 1
//   u32    encoder_length, encoder bytes (compact JSON of the EncoderState)
//   rows*cols x f64                                 IEEE-754, row-major
//
// The dataset fingerprint is recomputed from the embedded encoder on load.

void write_dataset_cache(std::ostream& out, const DatasetCache& cache);
DatasetCache read_dataset_cache(std::istream& in);

/// Writes atomically (temporary file + rename).
void save_dataset_cache(const std::filesystem::path& path, const DatasetCache& cache);
DatasetCache load_dataset_cache(const std::filesystem::path& path);

} // namespace rtvae
