namespace cle {}
