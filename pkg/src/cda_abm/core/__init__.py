# cda-abm core module
