// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spanqa {

std::string read_file(const std::string& path);  // format_error if unreadable

// Writes via a temp file + rename so failures never leave partial output.
void write_file_atomic(const std::string& path, const std::string& content);

std::string base64_encode(const void* data, size_t len);
std::vector<uint8_t> base64_decode(const std::string& s);  // format_error on bad input

// Doubles <-> base64 of their little-endian 64-bit representation.
// Bit-exact round trip by construction.
std::string doubles_to_b64(const std::vector<double>& v);
std::vector<double> b64_to_doubles(const std::string& s);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::string& path);

}  // namespace spanqa
