// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace egostream::probe {

/// Number of global operator new calls so far. Only meaningful in binaries
/// that link the egostream_alloc_probe target, which replaces operator new.
std::uint64_t allocation_count() noexcept;

}  // namespace egostream::probe
