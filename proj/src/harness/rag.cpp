#include "mockingbird/harness/rag.hpp"

#include <fstream>
#include <sstream>

#include "mockingbird/prompts.hpp"

namespace mockingbird::harness {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

RagMaterial::RagMaterial(std::string id, int level, std::vector<std::string> documents)
    : id_(std::move(id)), level_(level), documents_(std::move(documents)) {
  if (id_.empty()) throw Error("reference material needs an id");
  if (level_ < 1 || level_ > 3) throw Error("reference material level must be 1, 2 or 3");
  if (documents_.empty()) throw Error("reference material \"" + id_ + "\" has no documents");
  for (const auto& d : documents_) {
    if (d.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw Error("reference material \"" + id_ + "\" has a blank document");
    }
  }
}

RagMaterial rag_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  std::vector<std::string> documents;
  for (const auto& d : doc.at("documents")) {
    if (d.is_string()) {
      documents.push_back(d.get<std::string>());
    } else {
      std::filesystem::path p = d.at("path").get<std::string>();
      documents.push_back(read_text(p.is_absolute() || base_dir.empty() ? p : base_dir / p));
    }
  }
  return RagMaterial(doc.at("id").get<std::string>(), doc.at("level").get<int>(), std::move(documents));
}

RagMaterial load_rag(const std::filesystem::path& path) {
  auto doc = Json::parse(read_text(path), nullptr, false);
  if (doc.is_discarded()) throw Error(path.string() + ": not valid JSON");
  return rag_from_json(doc, path.parent_path());
}

bool inject_rag(memory::MemoryBranch& memory, const RagMaterial& material) {
  std::string body;
  for (const auto& d : material.documents()) {
    if (!body.empty()) body += "\n\n";
    body += d;
  }
  return memory.add_supplement("rag:" + material.id(),
                               memory::ChatMessage::system(prompts::reference_material(material.level(), body)));
}

}  // namespace mockingbird::harness
