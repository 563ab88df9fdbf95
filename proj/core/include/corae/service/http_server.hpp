#pragma once

#include <memory>
#include <string>

#include "corae/service/session_service.hpp"

namespace corae::service {

// HTTP front end for a SessionService.
//
//   POST /api/sessions                          create, returns participant URLs
//   GET  /api/sessions/{id}                     summary (no tokens)
//   POST /api/sessions/{id}/upload              attach a finished log file
//   GET  /api/sessions/{id}/analysis            report JSON; query: window, slope,
//                                               plateau_eps, sync, opposition, lag, ratio
//   GET  /a/{token}                             dashboard page
//   GET  /api/annotator/{token}                 annotator state
//   POST /api/annotator/{token}/identity        {"participant_id": "..."}
//   POST /api/annotator/{token}/annotations     {"annotations": [records]}
//   POST /api/annotator/{token}/complete        canonical log file
//   GET  /api/annotator/{token}/log             canonical log so far
//   GET  /media/{id}                            media bytes, honours Range
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds to `port`, or to a free port when `port` is 0. Returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace corae::service
