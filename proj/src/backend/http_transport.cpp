#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "mockingbird/backend/openai.hpp"

namespace mockingbird::backend {

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpReply post(const std::string& base_url, const std::string& path, const HttpHeaders& headers,
                 const std::string& body, std::chrono::milliseconds timeout) override {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers h;
    std::string content_type = "application/json";
    for (const auto& [k, v] : headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        h.emplace(k, v);
      }
    }

    auto result = client.Post(path, h, body, content_type);
    if (!result) {
      auto err = result.error();
      auto text = httplib::to_string(err);
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read || err == httplib::Error::Write) {
        throw BackendError(ErrorKind::timeout, text);
      }
      throw BackendError(ErrorKind::transport, text);
    }
    return HttpReply{result->status, result->body};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace mockingbird::backend
