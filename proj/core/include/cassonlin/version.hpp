#pragma once

#define CASSONLIN_VERSION_MAJOR 0
#define CASSONLIN_VERSION_MINOR 1
#define CASSONLIN_VERSION_PATCH 0
#define CASSONLIN_VERSION "0.1.0"
