#include "ragq/model_io.hpp"

#include <bit>

#include "ragq/errors.hpp"

namespace ragq {

void BinaryWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  buf_.append(s);
}

void BinaryWriter::f64s(std::span<const double> v) {
  u64(v.size());
  for (double x : v) f64(x);
}

void BinaryWriter::u64s(std::span<const std::uint64_t> v) {
  u64(v.size());
  for (auto x : v) u64(x);
}

void BinaryReader::need(std::size_t n) const {
  if (buf_.size() - pos_ < n) throw ParseError("model file is truncated", 0, pos_);
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
  pos_ += 8;
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::raw(std::size_t n) {
  need(n);
  std::string out = buf_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string BinaryReader::str() {
  const auto n = u64();
  return raw(n);
}

std::vector<double> BinaryReader::f64s() {
  const auto n = u64();
  need(n * 8);
  std::vector<double> out(n);
  for (auto& x : out) x = f64();
  return out;
}

std::vector<std::uint64_t> BinaryReader::u64s() {
  const auto n = u64();
  need(n * 8);
  std::vector<std::uint64_t> out(n);
  for (auto& x : out) x = u64();
  return out;
}

}  // namespace ragq
