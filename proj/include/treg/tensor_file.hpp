#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "treg/common.hpp"

namespace treg {

// TRTE tensor container: magic "TRTE", version 0x01, dtype byte (0x01 = f32,
// 0x02 = f64), ndim byte, ndim little-endian u64 dims, row-major payload.
enum class TensorDtype : std::uint8_t { F32 = 0x01, F64 = 0x02 };

struct TensorData {
    TensorDtype dtype = TensorDtype::F64;
    std::vector<std::uint64_t> dims;
    std::vector<double> values;  // row-major, widened to double on read

    std::uint64_t element_count() const {
        std::uint64_t n = 1;
        for (std::uint64_t d : dims) n *= d;
        return dims.empty() ? 0 : n;
    }
};

namespace trte_detail {

inline void put_u64_le(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t get_u64_le(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    if (!is) fail("trte: truncated input");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace trte_detail

inline void write_trte_header(std::ostream& os, TensorDtype dtype,
                              const std::vector<std::uint64_t>& dims) {
    os.write("TRTE", 4);
    os.put(static_cast<char>(0x01));  // version
    os.put(static_cast<char>(dtype));
    os.put(static_cast<char>(static_cast<unsigned char>(dims.size())));
    for (std::uint64_t d : dims) trte_detail::put_u64_le(os, d);
    if (!os) fail("trte: write failed");
}

// Payload chunks may be appended incrementally after the header; the caller
// owns keeping the total element count consistent with the dims.
inline void write_trte_payload(std::ostream& os, TensorDtype dtype, const double* values,
                               std::size_t count) {
    if (dtype == TensorDtype::F64) {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t bits;
            std::memcpy(&bits, &values[i], 8);
            trte_detail::put_u64_le(os, bits);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            float f = static_cast<float>(values[i]);
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            unsigned char buf[4];
            for (int b = 0; b < 4; ++b)
                buf[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
            os.write(reinterpret_cast<const char*>(buf), 4);
        }
    }
    if (!os) fail("trte: write failed");
}

inline void write_trte(std::ostream& os, const TensorData& tensor) {
    if (tensor.values.size() != tensor.element_count())
        fail("trte: dims describe ", tensor.element_count(), " elements, have ",
             tensor.values.size());
    write_trte_header(os, tensor.dtype, tensor.dims);
    write_trte_payload(os, tensor.dtype, tensor.values.data(), tensor.values.size());
}

inline TensorData read_trte(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TRTE", 4) != 0) fail("trte: bad magic");
    int version = is.get();
    if (version != 0x01) fail("trte: unsupported version ", version);
    int dtype = is.get();
    if (dtype != 0x01 && dtype != 0x02) fail("trte: unknown dtype ", dtype);
    int ndim = is.get();
    if (ndim < 0) fail("trte: truncated header");

    TensorData tensor;
    tensor.dtype = static_cast<TensorDtype>(dtype);
    tensor.dims.resize(static_cast<std::size_t>(ndim));
    for (int i = 0; i < ndim; ++i) tensor.dims[i] = trte_detail::get_u64_le(is);

    const std::uint64_t count = tensor.element_count();
    tensor.values.resize(count);
    if (tensor.dtype == TensorDtype::F64) {
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint64_t bits = trte_detail::get_u64_le(is);
            double v;
            std::memcpy(&v, &bits, 8);
            tensor.values[i] = v;
        }
    } else {
        for (std::uint64_t i = 0; i < count; ++i) {
            unsigned char buf[4];
            is.read(reinterpret_cast<char*>(buf), 4);
            if (!is) fail("trte: truncated payload");
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(buf[b]) << (8 * b);
            float f;
            std::memcpy(&f, &bits, 4);
            tensor.values[i] = static_cast<double>(f);
        }
    }
    return tensor;
}

inline void write_trte_file(const std::string& path, const TensorData& tensor) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail("trte: cannot open ", path, " for writing");
    write_trte(os, tensor);
}

inline TensorData read_trte_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail("trte: cannot open ", path);
    return read_trte(is);
}

}  // namespace treg
