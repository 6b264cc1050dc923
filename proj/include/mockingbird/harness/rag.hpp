#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mockingbird/memory/branch.hpp"

namespace mockingbird::harness {

/// Reference documents at one of three hint levels, 1 being the strongest.
class RagMaterial {
 public:
  /// Throws Error when `documents` is empty, a document is blank or the level is outside 1..3.
  RagMaterial(std::string id, int level, std::vector<std::string> documents);

  const std::string& id() const noexcept { return id_; }
  int level() const noexcept { return level_; }
  const std::vector<std::string>& documents() const noexcept { return documents_; }

 private:
  std::string id_;
  int level_;
  std::vector<std::string> documents_;
};

/// {"id", "level", "documents": [text...]}; a document may also be {"path": file}
/// resolved against `base_dir`.
RagMaterial rag_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
RagMaterial load_rag(const std::filesystem::path& path);

/// Adds the documents as a system block right after the system prompt.
/// Returns false when material with the same id is already present.
bool inject_rag(memory::MemoryBranch& memory, const RagMaterial& material);

}  // namespace mockingbird::harness
