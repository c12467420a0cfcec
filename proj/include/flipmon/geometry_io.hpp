// Copyright 2026 The Flipmon Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "flipmon/geometry.hpp"

namespace flipmon {

// Geometry documents are JSON. Lengths are micrometres except the
// interface thickness, which is nanometres. See schema/geometry.schema.json.

DeviceGeometry geometry_from_json(const nlohmann::json& doc);
nlohmann::json geometry_to_json(const DeviceGeometry& geometry);

/// Throws IoError when the file cannot be read, GeometryError when it is
/// not a well-formed geometry document.
DeviceGeometry load_geometry(const std::filesystem::path& path);
void save_geometry(const DeviceGeometry& geometry, const std::filesystem::path& path);

}  // namespace flipmon
