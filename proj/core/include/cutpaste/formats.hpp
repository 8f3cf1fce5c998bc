#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cutpaste/types.hpp"

namespace cutpaste {

// On-disk formats, all little-endian, no padding:
//   raster        magic "MSRA", u8 version=1, u8 dtype (0=u8,1=u16,2=f32),
//                 u16 bands, u32 height, u32 width, band-sequential samples
//   binary mask   magic "MSKB", u8 version=1, u32 height, u32 width,
//                 row-major 0/1 bytes
//   semantic mask magic "MSKL", u8 version=1, u32 height, u32 width,
//                 row-major class-id bytes (255 = ignore)

std::vector<std::uint8_t> encode_raster(const Raster& raster);
Raster decode_raster(const std::vector<std::uint8_t>& bytes, const std::string& context);

std::vector<std::uint8_t> encode_binary_mask(const BinaryMask& mask);
BinaryMask decode_binary_mask(const std::vector<std::uint8_t>& bytes, const std::string& context);

std::vector<std::uint8_t> encode_semantic_mask(const SemanticMask& mask);
SemanticMask decode_semantic_mask(const std::vector<std::uint8_t>& bytes, const std::string& context);

void write_raster(const std::filesystem::path& path, const Raster& raster);
Raster read_raster(const std::filesystem::path& path);

void write_binary_mask(const std::filesystem::path& path, const BinaryMask& mask);
BinaryMask read_binary_mask(const std::filesystem::path& path);

void write_semantic_mask(const std::filesystem::path& path, const SemanticMask& mask);
SemanticMask read_semantic_mask(const std::filesystem::path& path);

// classmap.json: {"classes": [{"id": 0, "name": "..."}, ...]}
void write_class_map(const std::filesystem::path& path, const ClassMap& class_map);
ClassMap read_class_map(const std::filesystem::path& path);

// Whole-file helpers; throw with the path on failure.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::string read_file_text(const std::filesystem::path& path);
void write_file_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cutpaste
