// SPDX-License-Identifier: Apache-2.0
//
// polmimo - dual-polarized Ricean MIMO channel modelling and analysis
// Copyright (C) 2026 The polmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "polmimo/snapshot_io.hpp"

#include "polmimo/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <system_error>

namespace polmimo
{

namespace
{

constexpr char kMagic[4] = {'P', 'M', 'S', '1'};
constexpr std::uint64_t kHeaderBytes = 4 + 4 * 4;

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t> &out, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t *p)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const std::uint8_t *p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

std::uint32_t to_u32(Index v, const char *what)
{
    if (v < 0 || static_cast<std::uint64_t>(v) > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument(std::string("encode_snapshots: ") + what + " does not fit in u32");
    return static_cast<std::uint32_t>(v);
}

} // namespace

std::vector<std::uint8_t> encode_snapshots(const SnapshotSet &set)
{
    set.validate();
    const PolarizationLayout &layout = set.layout;
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + static_cast<std::size_t>(layout.n_tx() + layout.n_rx()) +
                set.size() * static_cast<std::size_t>(layout.n_links()) * 16);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, to_u32(layout.n_rx(), "N_RX"));
    put_u32(out, to_u32(layout.n_tx(), "N_TX"));
    put_u32(out, to_u32(set.n_time, "N_t"));
    put_u32(out, to_u32(set.n_freq, "N_f"));
    for (Polarization p : layout.tx())
        out.push_back(static_cast<std::uint8_t>(p));
    for (Polarization p : layout.rx())
        out.push_back(static_cast<std::uint8_t>(p));
    for (const ComplexMatrix &h : set.snapshots)
        for (Index k = 0; k < h.size(); ++k)
        {
            put_f64(out, h.data()[k].real());
            put_f64(out, h.data()[k].imag());
        }
    return out;
}

SnapshotSet decode_snapshots(const std::vector<std::uint8_t> &bytes)
{
    const std::uint64_t size = bytes.size();
    if (size < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("bad magic, expected 'PMS1'", 0);
    if (size < kHeaderBytes)
        throw FormatError("truncated header: expected " + std::to_string(kHeaderBytes) + " bytes, found " +
                              std::to_string(size),
                          size);
    const std::uint64_t n_rx = get_u32(bytes.data() + 4);
    const std::uint64_t n_tx = get_u32(bytes.data() + 8);
    const std::uint64_t n_t = get_u32(bytes.data() + 12);
    const std::uint64_t n_f = get_u32(bytes.data() + 16);
    if (n_rx == 0 || n_tx == 0)
        throw FormatError("antenna counts must be positive", 4);

    // Each factor is below 2^32, so products of two are exact in 64 bits.
    const std::uint64_t links = n_rx * n_tx;
    const std::uint64_t count = n_t * n_f;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
    if (count != 0 && links > limit / 16 / count)
        throw FormatError("dimensions overflow the addressable payload size", 4);
    const std::uint64_t payload = links * count * 16;
    const std::uint64_t tags = n_tx + n_rx;
    if (payload > limit - kHeaderBytes - tags)
        throw FormatError("dimensions overflow the addressable payload size", 4);
    const std::uint64_t expected = kHeaderBytes + tags + payload;
    if (size < expected)
        throw FormatError("truncated file: expected " + std::to_string(expected) + " bytes, found " +
                              std::to_string(size),
                          size);
    if (size > expected)
        throw FormatError("trailing bytes: expected " + std::to_string(expected) + " bytes, found " +
                              std::to_string(size),
                          expected);

    std::vector<Polarization> tx_tags, rx_tags;
    for (std::uint64_t i = 0; i < tags; ++i)
    {
        const std::uint8_t b = bytes[kHeaderBytes + i];
        if (b > 1)
            throw FormatError("polarization tag " + std::to_string(b) + " is neither 0 (V) nor 1 (H)",
                              kHeaderBytes + i);
        (i < n_tx ? tx_tags : rx_tags).push_back(static_cast<Polarization>(b));
    }
    SnapshotSet set{PolarizationLayout::single(Polarization::V, 1, 1), static_cast<Index>(n_t),
                    static_cast<Index>(n_f), {}};
    try
    {
        set.layout = PolarizationLayout(std::move(tx_tags), std::move(rx_tags));
    }
    catch (const std::invalid_argument &e)
    {
        throw FormatError(std::string("invalid polarization layout: ") + e.what(), kHeaderBytes);
    }

    set.snapshots.reserve(count);
    const std::uint8_t *p = bytes.data() + kHeaderBytes + tags;
    for (std::uint64_t s = 0; s < count; ++s)
    {
        ComplexMatrix h(static_cast<Index>(n_rx), static_cast<Index>(n_tx));
        for (Index k = 0; k < h.size(); ++k, p += 16)
            h.data()[k] = Complex(get_f64(p), get_f64(p + 8));
        set.snapshots.push_back(std::move(h));
    }
    return set;
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
    {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at '" + path.string() + "'");
    }
}

void write_snapshots(const SnapshotSet &set, const std::filesystem::path &path)
{
    const std::vector<std::uint8_t> bytes = encode_snapshots(set);
    write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

SnapshotSet read_snapshots(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open snapshot file '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_snapshots(bytes);
}

} // namespace polmimo
