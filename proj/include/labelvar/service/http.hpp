#pragma once

#include <string>

namespace httplib {
class Server;
}

namespace labelvar::service {

class Workbench;

// Mounts every endpoint of the workbench on the server. The workbench must
// outlive the server.
void register_routes(httplib::Server& server, Workbench& bench);

// Blocks serving on host:port until the process is stopped. Returns false if
// the socket could not be bound.
bool serve(Workbench& bench, const std::string& host, int port);

}  // namespace labelvar::service
