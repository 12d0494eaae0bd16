namespace ctms {}
