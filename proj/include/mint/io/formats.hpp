#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mint/nn/activations.hpp"
#include "mint/nn/dataset.hpp"
#include "mint/nn/model.hpp"
#include "mint/prune/dependency.hpp"
#include "mint/prune/mask.hpp"

namespace mint::io {

// MINTACT1 activation file, little-endian:
//   "MINTACT1"
//   repeated until end of file:
//     u32 name length, name bytes (UTF-8)
//     u32 m, u32 N
//     m x u16 class labels
//     m x N float32, row-major
// A layer name may end in "@fnv1a64:<16 hex digits>", the FNV-1a hash of the
// record's float32 payload bytes. Readers verify and strip it.
inline constexpr std::string_view kActivationMagic = "MINTACT1";
inline constexpr std::string_view kChecksumTag = "@fnv1a64:";

std::vector<std::uint8_t> encode_activations(const nn::ActivationDump& dump, bool embed_checksums = false);
nn::ActivationDump decode_activations(std::span<const std::uint8_t> bytes);
void write_activations(const nn::ActivationDump& dump, const std::filesystem::path& path,
                       bool embed_checksums = false);
nn::ActivationDump read_activations(const std::filesystem::path& path);

/// FNV-1a over the little-endian float32 encoding of a matrix.
std::uint64_t activation_checksum(const gmi::SampleMatrix& values);

// MINTMDL1 model file, little-endian:
//   "MINTMDL1", u32 layer count
//   per layer: u32 N_out, u32 N_in, u8 activation (0 relu, 1 softmax),
//              N_out x N_in float32 weights (row-major), N_out float32 biases
inline constexpr std::string_view kModelMagic = "MINTMDL1";

std::vector<std::uint8_t> encode_model(const nn::MlpModel& model);
nn::MlpModel decode_model(std::span<const std::uint8_t> bytes);
void write_model(const nn::MlpModel& model, const std::filesystem::path& path);
nn::MlpModel read_model(const std::filesystem::path& path);

// Mask text file:
//   MINTMASK1
//   layers <count>
//   per layer:
//     layer <name> <rows> <cols> groups <consumer G> <producer G> delta <value|->
//     <rows> lines of <cols> characters '0'/'1'
// delta is printed in its shortest exact form, so it reads back bit-identical.
inline constexpr std::string_view kMaskMagic = "MINTMASK1";

std::string encode_mask(const prune::PruneMask& mask);
prune::PruneMask decode_mask(const std::string& text);
void write_mask(const prune::PruneMask& mask, const std::filesystem::path& path);
prune::PruneMask read_mask(const std::filesystem::path& path);

// Dependency tables as tab-separated text, one row per cell:
//   pair consumer_group producer_group rho fr_count subset_size
std::string encode_tables(const std::vector<prune::DependencyTable>& tables);
std::vector<prune::DependencyTable> decode_tables(const std::string& text);

// MNIST IDX files (big-endian). Pixels are scaled by 1/255.
nn::Dataset decode_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels);
nn::Dataset read_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Loads "train" or "test" from a directory holding the four standard file names.
nn::Dataset load_mnist(const std::filesystem::path& dir, const std::string& split);

}  // namespace mint::io
