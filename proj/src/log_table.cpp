#include "pinlab/log_table.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "pinlab/error.hpp"

namespace pinlab {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'I', 'N', 'L', 'A', 'B', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>)
    bits = std::bit_cast<std::uint64_t>(static_cast<double>(value));
  else
    bits = static_cast<std::uint64_t>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffU);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error("table cache: truncated stream");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if constexpr (std::is_floating_point_v<T>)
    return std::bit_cast<double>(bits);
  else
    return static_cast<T>(bits);
}

}  // namespace

LogTable::LogTable(int n) : n_(n), data_(entry_count(n), kNegInf) {}

void write_table(std::ostream& out, const TableHeader& header, const LogTable& table) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, header.disorder ? 1U : 0U);
  put<double>(out, header.alpha);
  put<std::uint64_t>(out, header.n_max);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(table.size()));
  if (header.disorder) {
    put<std::uint64_t>(out, header.disorder->seed);
    put<double>(out, header.disorder->beta);
    put<std::uint32_t>(out, header.disorder->dist);
    put<std::uint32_t>(out, 0U);
  }
  if constexpr (std::endian::native == std::endian::little) {
    const auto raw = table.raw();
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size_bytes()));
  } else {
    for (double v : table.raw()) put<double>(out, v);
  }
  if (!out) throw Error("table cache: write failed");
}

LogTable read_table(std::istream& in, TableHeader* header) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error("table cache: bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw Error("table cache: unsupported version " + std::to_string(version));
  const auto flags = get<std::uint32_t>(in);
  TableHeader h;
  h.alpha = get<double>(in);
  h.n_max = get<std::uint64_t>(in);
  h.n = get<std::uint64_t>(in);
  if (flags & 1U) {
    TableHeader::Disorder d;
    d.seed = get<std::uint64_t>(in);
    d.beta = get<double>(in);
    d.dist = get<std::uint32_t>(in);
    (void)get<std::uint32_t>(in);
    h.disorder = d;
  }
  if (h.n > (1U << 20)) throw Error("table cache: implausible size");
  LogTable table(static_cast<int>(h.n));
  auto raw = table.raw();
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size_bytes()));
    if (!in) throw Error("table cache: truncated stream");
  } else {
    for (double& v : raw) v = get<double>(in);
  }
  if (header) *header = h;
  return table;
}

}  // namespace pinlab
