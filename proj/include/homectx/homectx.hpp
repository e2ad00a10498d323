#pragma once

// Everything except the TCP server (homectx/server.hpp), which pulls in Boost.Asio.
#include "homectx/dedup.hpp"
#include "homectx/error.hpp"
#include "homectx/ingest.hpp"
#include "homectx/ontology.hpp"
#include "homectx/sparql.hpp"
#include "homectx/term.hpp"
#include "homectx/trace_gen.hpp"
#include "homectx/triple_store.hpp"
#include "homectx/turtle.hpp"
