# DataTriage test suite
