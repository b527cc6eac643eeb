#pragma once

#include <string>

#include "models.hpp"

namespace coarcta {

// Versioned JSON artifact files. Doubles are written with shortest
// round-trip representations, so a reloaded model reproduces predictions
// bit for bit.
std::string model_to_json(const ModelArtifact& artifact);
ModelArtifact model_from_json(const std::string& text);

void save_model(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_model(const std::string& path);

}  // namespace coarcta
